#include "starform/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace starform::io {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(join(path, key), "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(path, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw FormatError(path, "expected an integer, got " + std::string(j.type_name()));
  }
  return j.get<long long>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at_index(path, i)));
  return out;
}

Eigen::VectorXd vector_of(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.begin(), v.end())); }

/// Runs a factory, attributing invariant violations to `path`.
template <class F>
auto at(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const FormatError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

}  // namespace

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("", source + ": malformed JSON: " + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

json grid_to_json(const SphereGrid& grid) {
  json nodes = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) nodes.push_back(vector_json(grid.node(i)));
  return {{"dim", grid.dim()},
          {"nodes", std::move(nodes)},
          {"weights", std::vector<double>(grid.weights().begin(), grid.weights().end())}};
}

GridPtr grid_from_json(const json& j) {
  const auto dim = integer(require(j, "dim", ""), "dim");
  const auto& nodes = require(j, "nodes", "");
  if (!nodes.is_array()) throw FormatError("nodes", "expected an array of vectors");
  auto weights = numbers(require(j, "weights", ""), "weights");
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto v = numbers(nodes[i], at_index("nodes", i));
    if (static_cast<long long>(v.size()) != dim) {
      throw FormatError(at_index("nodes", i), "expected " + std::to_string(dim) + " coordinates");
    }
    for (long long r = 0; r < dim; ++r) m(r, static_cast<Eigen::Index>(i)) = v[static_cast<std::size_t>(r)];
  }
  return at("", [&] { return std::make_shared<const SphereGrid>(std::move(m), std::move(weights)); });
}

json body_to_json(const StarBodySpec& spec) {
  const auto& shape = spec.shape();
  if (const auto* b = std::get_if<Ball>(&shape)) return {{"shape", "ball"}, {"r", b->radius}};
  if (const auto* e = std::get_if<Ellipsoid>(&shape)) {
    return {{"shape", "ellipsoid"}, {"axes", vector_json(e->axes)}};
  }
  if (const auto* p = std::get_if<HPolytope>(&shape)) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < p->normals.rows(); ++r) {
      rows.push_back(vector_json(p->normals.row(r).transpose()));
    }
    return {{"shape", "hpolytope"}, {"A", std::move(rows)}, {"b", vector_json(p->offsets)}};
  }
  if (const auto* c = std::get_if<CapBump>(&shape)) {
    return {{"shape", "capbump"},
            {"center", vector_json(c->center)},
            {"alpha", c->alpha},
            {"h", c->height}};
  }
  const auto& s = std::get<RadialSumOf>(shape);
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back({{"lambda", t.lambda}, {"body", body_to_json(*t.body)}});
  return {{"shape", "radialsum"}, {"terms", std::move(terms)}};
}

StarBodySpec body_from_json(const json& j, const std::string& path) {
  const auto& shape_field = require(j, "shape", path);
  if (!shape_field.is_string()) throw FormatError(join(path, "shape"), "expected a string");
  const auto shape = shape_field.get<std::string>();
  if (shape == "ball") {
    const double r = number(require(j, "r", path), join(path, "r"));
    return at(join(path, "r"), [&] { return StarBodySpec::ball(r); });
  }
  if (shape == "ellipsoid") {
    auto axes = vector_of(require(j, "axes", path), join(path, "axes"));
    return at(join(path, "axes"), [&] { return StarBodySpec::ellipsoid(std::move(axes)); });
  }
  if (shape == "hpolytope") {
    const auto& rows = require(j, "A", path);
    if (!rows.is_array() || rows.empty()) throw FormatError(join(path, "A"), "expected a nonempty matrix");
    auto b = vector_of(require(j, "b", path), join(path, "b"));
    std::vector<Eigen::VectorXd> parsed;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      parsed.push_back(vector_of(rows[r], at_index(join(path, "A"), r)));
      if (parsed.back().size() != parsed.front().size()) {
        throw FormatError(at_index(join(path, "A"), r), "row length differs from row 0");
      }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(parsed.size()), parsed.front().size());
    for (std::size_t r = 0; r < parsed.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = parsed[r].transpose();
    return at(path, [&] { return StarBodySpec::hpolytope(std::move(a), std::move(b)); });
  }
  if (shape == "capbump") {
    auto center = vector_of(require(j, "center", path), join(path, "center"));
    const double alpha = number(require(j, "alpha", path), join(path, "alpha"));
    const double h = number(require(j, "h", path), join(path, "h"));
    return at(path, [&] { return StarBodySpec::cap_bump(std::move(center), alpha, h); });
  }
  if (shape == "radialsum") {
    const auto& terms = require(j, "terms", path);
    if (!terms.is_array()) throw FormatError(join(path, "terms"), "expected an array");
    std::vector<std::pair<double, StarBodySpec>> parsed;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto tp = at_index(join(path, "terms"), i);
      const double lambda = number(require(terms[i], "lambda", tp), join(tp, "lambda"));
      parsed.emplace_back(lambda, body_from_json(require(terms[i], "body", tp), join(tp, "body")));
    }
    return at(join(path, "terms"), [&] { return StarBodySpec::radial_sum(std::move(parsed)); });
  }
  throw FormatError(join(path, "shape"), "unknown shape '" + shape + "'");
}

std::vector<StarBodySpec> bodies_from_json(const json& j) {
  const json* list = &j;
  std::string path;
  if (j.is_object()) {
    list = &require(j, "bodies", "");
    path = "bodies";
  }
  if (!list->is_array()) throw FormatError(path, "expected an array of bodies");
  std::vector<StarBodySpec> out;
  for (std::size_t i = 0; i < list->size(); ++i) out.push_back(body_from_json((*list)[i], at_index(path, i)));
  return out;
}

json tensor_to_json(const PolyMeasure& gamma) {
  return {{"order", gamma.order()},
          {"atoms", gamma.atom_count()},
          {"entries", std::vector<double>(gamma.entries().begin(), gamma.entries().end())}};
}

PolyMeasure tensor_from_json(const json& j) {
  const auto order = integer(require(j, "order", ""), "order");
  const auto atoms = integer(require(j, "atoms", ""), "atoms");
  if (order < 1) throw FormatError("order", "must be at least 1");
  if (atoms < 1) throw FormatError("atoms", "must be at least 1");
  auto entries = numbers(require(j, "entries", ""), "entries");
  return at("entries", [&] {
    return PolyMeasure(static_cast<int>(order), static_cast<std::size_t>(atoms), std::move(entries));
  });
}

json measure_to_json(const std::vector<double>& masses) { return {{"masses", masses}}; }

std::vector<double> measure_from_json(const json& j) {
  if (j.is_array()) return numbers(j, "");
  return numbers(require(j, "masses", ""), "masses");
}

json to_json(const LutwakReport& r) {
  return {{"direct", r.direct}, {"expanded", r.expanded}, {"abs_diff", r.abs_diff}};
}

json to_json(const CheckReport& r) {
  json out = {{"name", r.name}, {"max_violation", r.max_violation}, {"scale", r.scale}, {"pass", r.pass}};
  if (r.witness) {
    json w = json::array();
    for (const auto& b : *r.witness) w.push_back(body_to_json(b));
    out["witness"] = std::move(w);
  }
  return out;
}

json to_json(const SemivariationResult& r) {
  return {{"value", r.value}, {"lower_bound", r.lower_bound}, {"signs", r.signs}};
}

json to_json(const RecoveryReport& r) {
  return {{"measure", r.measure},
          {"degree", r.degree},
          {"max_rel_error", r.max_rel_error},
          {"validation_samples", r.validation_samples},
          {"pass", r.pass}};
}

json to_json(const RotationReduction& r) {
  return {{"c", r.c},
          {"residual", r.residual},
          {"invariance_residual", r.invariance_residual},
          {"rotations", r.group_generators}};
}

json to_json(const ViolationWitness& w) {
  json bodies = json::array();
  for (const auto& b : w.bodies) bodies.push_back(body_to_json(b));
  return {{"bodies", std::move(bodies)},
          {"atoms", w.atoms},
          {"entry", w.entry},
          {"value", w.value},
          {"disjoint_pair", {w.disjoint_pair.first, w.disjoint_pair.second}}};
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace starform::io
