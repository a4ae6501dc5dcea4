#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "starform/dual_volume.hpp"
#include "starform/error.hpp"
#include "starform/functional.hpp"
#include "starform/polymeasure.hpp"
#include "starform/sphere_grid.hpp"
#include "starform/star_body.hpp"

namespace starform::io {

using nlohmann::json;

/// Malformed input: carries the JSON path of the offending field.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error(field.empty() ? what : "field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses text, turning syntax errors into FormatError with line and column.
json parse(const std::string& text, const std::string& source = "input");
json read_file(const std::string& path);

/// {"dim": n, "nodes": [[x, y, ...], ...], "weights": [...]}
json grid_to_json(const SphereGrid& grid);
GridPtr grid_from_json(const json& j);

/// {"shape": "ball" | "ellipsoid" | "hpolytope" | "capbump" | "radialsum", ...}
json body_to_json(const StarBodySpec& spec);
StarBodySpec body_from_json(const json& j, const std::string& path = "");
/// A JSON array of bodies, or an object with a "bodies" array.
std::vector<StarBodySpec> bodies_from_json(const json& j);

/// {"order": m, "atoms": k, "entries": [flat row-major]}
json tensor_to_json(const PolyMeasure& gamma);
PolyMeasure tensor_from_json(const json& j);

/// {"masses": [...]} (a bare array is accepted too)
json measure_to_json(const std::vector<double>& masses);
std::vector<double> measure_from_json(const json& j);

json to_json(const LutwakReport& r);
json to_json(const CheckReport& r);
json to_json(const SemivariationResult& r);
json to_json(const RecoveryReport& r);
json to_json(const RotationReduction& r);
json to_json(const ViolationWitness& w);

/// Shortest round-trip decimal form of a double ("4", "3.141592653589793").
std::string format_number(double x);

}  // namespace starform::io
