// starform: command-line front end. See README.md for the subcommands.
//
// Exit codes: 0 pass, 1 a check failed, 2 usage error or malformed input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance_suite.hpp"
#include "starform/dual_volume.hpp"
#include "starform/error.hpp"
#include "starform/functional.hpp"
#include "starform/json_io.hpp"
#include "starform/polymeasure.hpp"
#include "starform/sphere_grid.hpp"
#include "starform/star_body.hpp"

namespace {

using namespace starform;
using nlohmann::json;

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::string command;
  std::string subcommand;
  int dim = 0;  // 0: inferred from the inputs
  int grid_res = 64;
  double tol_rel = 1e-9;
  std::uint64_t seed = 0;
  int trials = 50;
  std::string out;
  std::string format = "json";
  std::string mode = "exact";
  std::string bodies;
  std::string lambdas;
  std::string tensor;
  std::string backing;
  int arity = 0;
  std::string poly_from;
  int degree = 0;
  std::string measure;
  std::string group = "cyclic";
  std::string suite = "all";
  double tol = -1.0;
  std::size_t samples = 0;
};

// The output path is left out so that two runs differing only in --out
// produce identical files.
json config_json(const RunConfig& c) {
  const bool gridded = c.command != "pm" && c.command != "accept";
  json j = {{"command", c.command}, {"seed", c.seed}, {"tol_rel", c.tol_rel}};
  if (!c.subcommand.empty()) j["subcommand"] = c.subcommand;
  if (gridded) j["grid_res"] = c.grid_res;
  if (gridded && c.dim > 0) j["dim"] = c.dim;
  if (c.command == "characterize" || c.command == "recover") j["trials"] = c.trials;
  if (c.command == "pm") {
    j["tensor"] = c.tensor;
    if (c.subcommand == "semivariation") j["mode"] = c.mode;
    if (c.samples > 0) j["samples"] = c.samples;
  }
  if (c.tol >= 0) j["tol"] = c.tol;
  if (!c.bodies.empty()) j["bodies"] = c.bodies;
  if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
  if (!c.backing.empty()) j["backing"] = c.backing;
  if (c.arity > 0) j["arity"] = c.arity;
  if (!c.poly_from.empty()) j["poly_from"] = c.poly_from;
  if (c.degree > 0) j["degree"] = c.degree;
  if (!c.measure.empty()) {
    j["measure"] = c.measure;
    j["group"] = c.group;
  }
  if (c.command == "accept") j["suite"] = c.suite;
  return j;
}

/// Usage errors detected after parsing (exit 2).
struct UsageError : Error {
  using Error::Error;
};

using Table = std::vector<std::vector<std::string>>;

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& row : t) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void emit(const RunConfig& cfg, const json& report, const Table& table) {
  const std::string text = cfg.format == "csv" ? to_csv(table) : report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + cfg.out);
  f << text;
}

json with_config(const RunConfig& cfg, json report) {
  report["config"] = config_json(cfg);
  return report;
}

GridPtr grid_for(const RunConfig& cfg, int dim) { return make_grid(dim, cfg.grid_res); }

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(flag + " is empty");
  return out;
}

int body_dim(const std::vector<StarBodySpec>& bodies, int requested) {
  int dim = requested;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const int d = bodies[i].dim();
    if (d == 0) continue;
    if (dim != 0 && d != dim) {
      throw UsageError("body " + std::to_string(i) + " lives in dimension " + std::to_string(d) +
                       ", expected " + std::to_string(dim));
    }
    dim = d;
  }
  return dim;
}

int run_grid(const RunConfig& cfg) {
  if (cfg.dim == 0) throw UsageError("grid needs --dim");
  const auto grid = grid_for(cfg, cfg.dim);
  Table t;
  t.push_back(cfg.dim == 2 ? std::vector<std::string>{"x", "y", "weight"}
                           : std::vector<std::string>{"x", "y", "z", "weight"});
  for (std::size_t i = 0; i < grid->size(); ++i) {
    std::vector<std::string> row;
    for (int r = 0; r < cfg.dim; ++r) row.push_back(io::format_number(grid->node(i)[r]));
    row.push_back(io::format_number(grid->weight(i)));
    t.push_back(std::move(row));
  }
  emit(cfg, with_config(cfg, io::grid_to_json(*grid)), t);
  return kPass;
}

int run_dmv(const RunConfig& cfg) {
  const auto bodies = io::bodies_from_json(io::read_file(cfg.bodies));
  if (bodies.empty()) throw UsageError("dmv needs at least one body");
  const int dim = cfg.dim != 0 ? cfg.dim : static_cast<int>(bodies.size());
  if (body_dim(bodies, dim) != dim || static_cast<int>(bodies.size()) != dim) {
    throw UsageError("dmv in dimension " + std::to_string(dim) + " takes exactly " +
                     std::to_string(dim) + " bodies, got " + std::to_string(bodies.size()));
  }
  const auto grid = grid_for(cfg, dim);
  std::vector<RadialFunction> fs;
  for (const auto& b : bodies) fs.push_back(sample(b, grid));
  const double v = dual_mixed_volume(fs);
  std::cout << io::format_number(v) << "\n";
  if (!cfg.out.empty()) emit(cfg, with_config(cfg, {{"value", v}}), {{"value"}, {io::format_number(v)}});
  return kPass;
}

int run_lutwak(const RunConfig& cfg) {
  const auto bodies = io::bodies_from_json(io::read_file(cfg.bodies));
  const auto lambdas = parse_list(cfg.lambdas, "--lambdas");
  if (lambdas.size() != bodies.size()) {
    throw UsageError("--lambdas has " + std::to_string(lambdas.size()) + " values for " +
                     std::to_string(bodies.size()) + " bodies");
  }
  const int dim = body_dim(bodies, cfg.dim);
  if (dim == 0) throw UsageError("no body fixes the dimension; pass --dim");
  const auto r = lutwak_check(bodies, lambdas, grid_for(cfg, dim));
  const bool pass = r.abs_diff <= cfg.tol_rel * std::max(1.0, std::abs(r.direct));
  json report = io::to_json(r);
  report["pass"] = pass;
  emit(cfg, with_config(cfg, report),
       {{"direct", "expanded", "abs_diff", "pass"},
        {io::format_number(r.direct), io::format_number(r.expanded), io::format_number(r.abs_diff),
         pass ? "true" : "false"}});
  return pass ? kPass : kCheckFailed;
}

Table tensor_table(const PolyMeasure& a, const PolyMeasure* b, const std::vector<std::string>& cols) {
  Table t;
  std::vector<std::string> header;
  for (int l = 0; l < a.order(); ++l) header.push_back("j" + std::to_string(l + 1));
  for (const auto& c : cols) header.push_back(c);
  t.push_back(header);
  for (std::size_t flat = 0; flat < a.entries().size(); ++flat) {
    std::vector<std::string> row;
    for (std::size_t j : a.multi_index(flat)) row.push_back(std::to_string(j));
    row.push_back(io::format_number(a.entries()[flat]));
    if (b) row.push_back(io::format_number(b->entries()[flat]));
    t.push_back(std::move(row));
  }
  return t;
}

int run_pm(const RunConfig& cfg) {
  const auto gamma = io::tensor_from_json(io::read_file(cfg.tensor));
  const std::string& sub = cfg.subcommand;
  if (sub == "variation") {
    const double v = variation(gamma);
    std::cout << io::format_number(v) << "\n";
    if (!cfg.out.empty()) emit(cfg, with_config(cfg, {{"value", v}}), {{"value"}, {io::format_number(v)}});
    return kPass;
  }
  if (sub == "semivariation") {
    const auto mode = cfg.mode == "exact" ? SemivariationMode::exact : SemivariationMode::randomized;
    const auto r = semivariation(gamma, mode, cfg.seed, cfg.samples);
    emit(cfg, with_config(cfg, io::to_json(r)),
         {{"value", "lower_bound"}, {io::format_number(r.value), r.lower_bound ? "true" : "false"}});
    return kPass;
  }
  if (sub == "decompose") {
    const auto [plus, minus] = jordan_decomposition(gamma);
    const json report = {{"plus", io::tensor_to_json(plus)},
                         {"minus", io::tensor_to_json(minus)},
                         {"variation_plus", variation(plus)},
                         {"variation_minus", variation(minus)}};
    emit(cfg, with_config(cfg, report), tensor_table(plus, &minus, {"plus", "minus"}));
    return kPass;
  }
  if (sub == "diagonal") {
    if (cfg.tol < 0) throw UsageError("pm diagonal needs an explicit --tol");
    const auto check = is_diagonal(gamma, cfg.tol);
    json report = {{"diagonal", check.diagonal}};
    Table t;
    if (check.diagonal) {
      const auto mu = diagonal_measure(gamma, cfg.tol);
      report["measure"] = mu;
      t.push_back({"atom", "mass"});
      for (std::size_t j = 0; j < mu.size(); ++j) t.push_back({std::to_string(j), io::format_number(mu[j])});
    } else {
      report["witness"] = *check.witness;
      report["witness_entry"] = check.witness_entry;
      t.push_back({"witness", "entry"});
      std::string idx;
      for (std::size_t j : *check.witness) idx += (idx.empty() ? "" : " ") + std::to_string(j);
      t.push_back({idx, io::format_number(check.witness_entry)});
    }
    emit(cfg, with_config(cfg, report), t);
    return check.diagonal ? kPass : kCheckFailed;
  }
  // product
  const auto p = product_measure(gamma);
  const json report = {{"order", p.order()},
                       {"factor_atoms", p.factor_atoms()},
                       {"masses", std::vector<double>(p.masses().begin(), p.masses().end())},
                       {"total_mass", p.total_mass()}};
  emit(cfg, with_config(cfg, report), tensor_table(gamma, nullptr, {"mass"}));
  return kPass;
}

int run_characterize(const RunConfig& cfg) {
  const json input = io::read_file(cfg.backing);
  const int dim = cfg.dim != 0 ? cfg.dim : 2;
  const auto grid = grid_for(cfg, dim);
  const bool is_tensor = input.is_object() && input.contains("order");
  std::optional<BodyFunctional> f;
  if (is_tensor) {
    auto gamma = io::tensor_from_json(input);
    if (cfg.arity != 0 && cfg.arity != gamma.order()) {
      throw UsageError("--arity " + std::to_string(cfg.arity) + " does not match tensor order " +
                       std::to_string(gamma.order()));
    }
    if (gamma.atom_count() != grid->size()) {
      throw UsageError("tensor has " + std::to_string(gamma.atom_count()) +
                       " atoms but the grid has " + std::to_string(grid->size()) + " nodes");
    }
    f = from_polymeasure(grid, PolyMeasure(gamma.order(), FinitePartition::node_level(grid),
                                           std::vector<double>(gamma.entries().begin(),
                                                               gamma.entries().end())));
  } else {
    if (cfg.arity == 0) throw UsageError("a measure backing needs --arity");
    f = from_measure(grid, io::measure_from_json(input), cfg.arity);
  }

  HarnessOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.tol_rel = cfg.tol_rel;
  const std::vector<CheckReport> checks = {check_vanishing_on_disjoint(*f, opts),
                                           check_symmetry(*f, opts),
                                           check_poly_orthogonal_additivity(*f, opts)};
  bool pass = true;
  json list = json::array();
  Table t = {{"name", "max_violation", "scale", "pass"}};
  for (const auto& c : checks) {
    pass = pass && c.pass;
    list.push_back(io::to_json(c));
    t.push_back({c.name, io::format_number(c.max_violation), io::format_number(c.scale),
                 c.pass ? "true" : "false"});
  }
  json report = {{"backing", is_tensor ? "tensor" : "measure"}, {"checks", list}};
  if (is_tensor) {
    const auto& gamma = std::get<BodyFunctional::Tensor>(f->backing()).gamma;
    if (!is_diagonal(gamma, kDiagonalTol).diagonal) {
      // Sampling may miss a sparse off-diagonal entry; the witness does not.
      report["violation_witness"] = io::to_json(find_violation_witness(*f));
      pass = false;
    }
  }
  report["pass"] = pass;
  emit(cfg, with_config(cfg, report), t);
  return pass ? kPass : kCheckFailed;
}

int run_recover(const RunConfig& cfg) {
  const auto nu = io::measure_from_json(io::read_file(cfg.poly_from));
  const int dim = cfg.dim != 0 ? cfg.dim : 2;
  const auto grid = grid_for(cfg, dim);
  if (nu.size() != grid->size()) {
    throw UsageError("measure has " + std::to_string(nu.size()) + " masses but the grid has " +
                     std::to_string(grid->size()) + " nodes");
  }
  const int degree = cfg.degree != 0 ? cfg.degree : dim;
  const HomogeneousPolynomial poly{degree, [nu, degree](const GridFunction& f) {
                                     double s = 0.0;
                                     for (std::size_t i = 0; i < nu.size(); ++i) {
                                       double p = 1.0;
                                       for (int k = 0; k < degree; ++k) p *= f[i];
                                       s += nu[i] * p;
                                     }
                                     return s;
                                   }};
  HarnessOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.tol_rel = cfg.tol_rel;
  const auto r = recover_measure_from_polynomial(poly, grid, opts);
  const bool exact = r.measure == nu;
  json report = io::to_json(r);
  report["exact"] = exact;
  Table t = {{"node", "planted", "recovered"}};
  for (std::size_t i = 0; i < nu.size(); ++i) {
    t.push_back({std::to_string(i), io::format_number(nu[i]), io::format_number(r.measure[i])});
  }
  emit(cfg, with_config(cfg, report), t);
  return r.pass && exact ? kPass : kCheckFailed;
}

int run_reduce(const RunConfig& cfg) {
  const auto mu = io::measure_from_json(io::read_file(cfg.measure));
  const int dim = cfg.dim != 0 ? cfg.dim : 2;
  const auto grid = grid_for(cfg, dim);
  std::vector<Rotation> group;
  if (dim == 2) {
    group = cyclic_group(*grid);
  } else {
    // Azimuthal steps of the product grid: closed, but never transitive.
    const int steps = 2 * cfg.grid_res;
    for (int s = 0; s < steps; ++s) group.push_back(Rotation::about_axis({0, 0, 1}, 2 * M_PI * s / steps));
  }
  const auto f = from_measure(grid, mu, dim);
  json report;
  Table t;
  int code = kPass;
  try {
    const auto r = reduce_rotation_invariant(f, group, cfg.tol >= 0 ? cfg.tol : 1e-12);
    report = io::to_json(r);
    report["pass"] = true;
    t = {{"c", "residual", "invariance_residual"},
         {io::format_number(r.c), io::format_number(r.residual), io::format_number(r.invariance_residual)}};
  } catch (const InvarianceViolation& e) {
    report = {{"pass", false}, {"error", "invariance"}, {"node", e.node()},
              {"invariance_residual", e.residual()}, {"message", e.what()}};
    t = {{"error", "node", "invariance_residual"},
         {"invariance", std::to_string(e.node()), io::format_number(e.residual())}};
    code = kCheckFailed;
  } catch (const NotTransitive& e) {
    report = {{"pass", false}, {"error", "not_transitive"}, {"orbit_size", e.orbit_size()},
              {"message", e.what()}};
    t = {{"error", "orbit_size"}, {"not_transitive", std::to_string(e.orbit_size())}};
    code = kCheckFailed;
  }
  emit(cfg, with_config(cfg, report), t);
  return code;
}

int run_accept(const RunConfig& cfg) {
  const auto ids = acceptance::parse_suite(cfg.suite);
  const auto report = acceptance::run_suite(ids, cfg.seed);
  Table t = {{"id", "name", "pass"}};
  for (const auto& c : report.criteria) {
    std::cerr << (c.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.name << "\n";
    t.push_back({std::to_string(c.id), c.name, c.pass ? "true" : "false"});
  }
  emit(cfg, with_config(cfg, report.to_json()), t);
  return report.pass() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Dual mixed volumes, polymeasures and disjoint-vanishing functionals on sphere grids"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool grid_flags) {
    sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", cfg.seed, "Seed for every random choice");
    sub->add_option("--tol-rel", cfg.tol_rel, "Relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--trials", cfg.trials, "Sampled trials per check")->check(CLI::PositiveNumber);
    if (grid_flags) {
      sub->add_option("--dim", cfg.dim, "Ambient dimension")->check(CLI::IsMember({2, 3}));
      sub->add_option("--grid-res", cfg.grid_res, "Grid resolution")->check(CLI::Range(4, 1 << 20));
    }
  };

  auto* grid = app.add_subcommand("grid", "Emit a quadrature grid");
  common(grid, true);

  auto* dmv = app.add_subcommand("dmv", "Dual mixed volume of n bodies");
  common(dmv, true);
  dmv->add_option("--bodies", cfg.bodies, "Body JSON file")->required();

  auto* lut = app.add_subcommand("lutwak", "Check the radial-sum volume expansion");
  common(lut, true);
  lut->add_option("--bodies", cfg.bodies, "Body JSON file")->required();
  lut->add_option("--lambdas", cfg.lambdas, "Comma-separated scales, one per body")->required();

  auto* pm = app.add_subcommand("pm", "Finite polymeasure operations");
  pm->require_subcommand(1);
  for (const char* name : {"variation", "semivariation", "decompose", "diagonal", "product"}) {
    auto* sub = pm->add_subcommand(name);
    common(sub, false);
    sub->add_option("--tensor", cfg.tensor, "Tensor JSON file")->required();
    if (std::string(name) == "semivariation") {
      sub->add_option("--mode", cfg.mode)->check(CLI::IsMember({"exact", "randomized"}));
      sub->add_option("--samples", cfg.samples, "Randomized-mode samples (0: automatic)");
    }
    if (std::string(name) == "diagonal") {
      sub->add_option("--tol", cfg.tol, "Off-diagonal tolerance")->check(CLI::NonNegativeNumber);
    }
  }

  auto* ch = app.add_subcommand("characterize", "Run the disjoint-vanishing checks on a functional");
  common(ch, true);
  ch->add_option("--backing", cfg.backing, "Measure or tensor JSON file")->required();
  ch->add_option("--arity", cfg.arity, "Number of arguments")->check(CLI::PositiveNumber);

  auto* rec = app.add_subcommand("recover", "Recover the measure of sum nu_i f_i^n");
  common(rec, true);
  rec->add_option("--poly-from", cfg.poly_from, "Measure JSON file defining the polynomial")->required();
  rec->add_option("--degree", cfg.degree, "Polynomial degree (default: --dim)")->check(CLI::PositiveNumber);

  auto* red = app.add_subcommand("reduce", "Reduce a rotation-invariant measure to c * dual volume");
  common(red, true);
  red->add_option("--measure", cfg.measure, "Measure JSON file")->required();
  red->add_option("--group", cfg.group, "Rotation group")->check(CLI::IsMember({"cyclic"}));
  red->add_option("--tol", cfg.tol, "Invariance tolerance relative to max |mu| (default 1e-12)")
      ->check(CLI::NonNegativeNumber);

  auto* acc = app.add_subcommand("accept", "Run the acceptance suite");
  common(acc, false);
  acc->add_option("--suite", cfg.suite, "'all' or comma-separated criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    for (auto* nested : sub->get_subcommands()) cfg.subcommand = nested->get_name();
  }

  try {
    if (cfg.command == "grid") return run_grid(cfg);
    if (cfg.command == "dmv") return run_dmv(cfg);
    if (cfg.command == "lutwak") return run_lutwak(cfg);
    if (cfg.command == "pm") return run_pm(cfg);
    if (cfg.command == "characterize") return run_characterize(cfg);
    if (cfg.command == "recover") return run_recover(cfg);
    if (cfg.command == "reduce") return run_reduce(cfg);
    return run_accept(cfg);
  } catch (const io::FormatError& e) {
    std::cerr << "starform: malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "starform: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "starform: " << e.what() << "\n";
    return kUsage;
  } catch (const ProbeFailure& e) {
    std::cerr << "starform: check failed: " << e.property() << ": " << e.what()
              << " (violation " << io::format_number(e.violation()) << ")\n";
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "starform: check failed: " << e.what() << "\n";
    return kCheckFailed;
  }
}
