#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "starform/json_io.hpp"

namespace starform {
namespace {

using io::FormatError;
using nlohmann::json;

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.field();
  }
  return "<no error>";
}

TEST(Json, GridRoundTrip) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, 6);
    const auto back = io::grid_from_json(io::parse(io::grid_to_json(*g).dump()));
    EXPECT_TRUE(back->same_as(*g));
  }
}

TEST(Json, GridErrors) {
  EXPECT_EQ(field_of([] { io::grid_from_json(json{{"nodes", json::array()}, {"weights", json::array()}}); }),
            "dim");
  const json bad = {{"dim", 2}, {"nodes", {{1.0, 0.0}, {-1.0}}}, {"weights", {M_PI, M_PI}}};
  EXPECT_EQ(field_of([&] { io::grid_from_json(bad); }), "nodes[1]");
  const json unbalanced = {{"dim", 2}, {"nodes", {{1.0, 0.0}, {-1.0, 0.0}}}, {"weights", {1.0, 1.0}}};
  EXPECT_THROW(io::grid_from_json(unbalanced), FormatError);
}

TEST(Json, BodyRoundTrip) {
  Eigen::MatrixXd a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd axes(2);
  axes << 2, 1;
  Eigen::VectorXd c(2);
  c << 0, 1;
  const std::vector<StarBodySpec> bodies = {
      StarBodySpec::ball(1.5), StarBodySpec::ellipsoid(axes),
      StarBodySpec::hpolytope(a, Eigen::VectorXd::Ones(4)), StarBodySpec::cap_bump(c, 0.5, 1.0),
      StarBodySpec::radial_sum({{2.0, StarBodySpec::ball(1)}, {0.5, StarBodySpec::ellipsoid(axes)}})};
  const auto g = make_grid(2, 32);
  for (const auto& b : bodies) {
    const auto j = io::body_to_json(b);
    const auto back = io::body_from_json(io::parse(j.dump()));
    EXPECT_EQ(io::body_to_json(back), j);
    const auto s1 = sample(b, g);
    const auto s2 = sample(back, g);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(s1[i], s2[i]);
  }
}

TEST(Json, BodyExamplesFromTheFormat) {
  const auto b = io::body_from_json(io::parse(R"({"shape":"ball","r":1.0})"));
  EXPECT_EQ(std::get<Ball>(b.shape()).radius, 1.0);
  const auto s = io::body_from_json(io::parse(
      R"({"shape":"radialsum","terms":[{"lambda":2.0,"body":{"shape":"ball","r":1}}]})"));
  EXPECT_EQ(std::get<RadialSumOf>(s.shape()).terms.size(), 1u);
}

TEST(Json, BodyErrorsNameTheField) {
  EXPECT_EQ(field_of([] { io::body_from_json(json{{"shape", "ball"}}); }), "r");
  EXPECT_EQ(field_of([] { io::body_from_json(json{{"shape", "ball"}, {"r", -1}}); }), "r");
  EXPECT_EQ(field_of([] { io::body_from_json(json{{"shape", "cube"}}); }), "shape");
  EXPECT_EQ(field_of([] { io::body_from_json(json{{"shape", "ellipsoid"}, {"axes", {1, "x"}}}); }),
            "axes[1]");
  EXPECT_EQ(field_of([] {
              io::bodies_from_json(json{{"bodies", {{{"shape", "ball"}, {"r", 1}},
                                                    {{"shape", "capbump"}, {"center", {1, 0}}}}}});
            }),
            "bodies[1].alpha");
  EXPECT_EQ(field_of([] {
              io::body_from_json(json::parse(
                  R"({"shape":"radialsum","terms":[{"lambda":1,"body":{"shape":"ball"}}]})"));
            }),
            "terms[0].body.r");
}

TEST(Json, BodiesAcceptsBareArray) {
  EXPECT_EQ(io::bodies_from_json(io::parse(R"([{"shape":"ball","r":1},{"shape":"ball","r":2}])")).size(),
            2u);
}

TEST(Json, TensorRoundTrip) {
  const PolyMeasure g(2, 2, {1, -1, -1, 1});
  const auto back = io::tensor_from_json(io::parse(io::tensor_to_json(g).dump()));
  EXPECT_EQ(back.order(), 2);
  EXPECT_EQ(back.atom_count(), 2u);
  EXPECT_EQ(std::vector<double>(back.entries().begin(), back.entries().end()),
            (std::vector<double>{1, -1, -1, 1}));
}

TEST(Json, TensorErrors) {
  EXPECT_EQ(field_of([] { io::tensor_from_json(json{{"order", 2}, {"atoms", 2}, {"entries", {1, 2, 3}}}); }),
            "entries");
  EXPECT_EQ(field_of([] { io::tensor_from_json(json{{"order", 1.5}, {"atoms", 2}, {"entries", {1, 2}}}); }),
            "order");
  EXPECT_EQ(field_of([] { io::tensor_from_json(json{{"atoms", 2}}); }), "order");
  EXPECT_EQ(field_of([] { io::tensor_from_json(json{{"order", 0}, {"atoms", 2}, {"entries", {1}}}); }),
            "order");
}

TEST(Json, Measure) {
  EXPECT_EQ(io::measure_from_json(io::parse(R"({"masses":[1,2.5]})")), (std::vector<double>{1, 2.5}));
  EXPECT_EQ(io::measure_from_json(io::parse("[3]")), (std::vector<double>{3}));
  EXPECT_EQ(field_of([] { io::measure_from_json(io::parse(R"({"masses":[1,null]})")); }), "masses[1]");
  EXPECT_EQ(io::measure_from_json(io::measure_to_json({0.5, 0.25})), (std::vector<double>{0.5, 0.25}));
}

TEST(Json, ParseErrorReportsPosition) {
  try {
    io::parse("{\"a\": [1,\n 2", "in.json");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("in.json"), std::string::npos);
    EXPECT_NE(what.find("line 2"), std::string::npos);
  }
  EXPECT_THROW(io::read_file("/nonexistent/file.json"), FormatError);
}

TEST(Json, Reports) {
  const auto j = io::to_json(CheckReport{"symmetry", 0.0, 1.0, true, std::nullopt});
  EXPECT_EQ(j["name"], "symmetry");
  EXPECT_FALSE(j.contains("witness"));
  const auto s = io::to_json(SemivariationResult{4.0, false, {{1, -1}, {1, -1}}});
  EXPECT_EQ(s["value"], 4.0);
  EXPECT_EQ(s["signs"][0][1], -1);
  EXPECT_EQ(io::to_json(LutwakReport{1.0, 1.0, 0.0})["abs_diff"], 0.0);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(4.0), "4");
  EXPECT_EQ(io::format_number(M_PI), "3.141592653589793");
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(-2.5e-20), "-2.5e-20");
  for (double x : {1.0 / 3.0, 1e300, 5e-324, 123456.789}) {
    EXPECT_EQ(std::strtod(io::format_number(x).c_str(), nullptr), x);
  }
}

}  // namespace
}  // namespace starform
