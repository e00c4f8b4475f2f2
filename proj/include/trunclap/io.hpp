#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "trunclap/geometry.hpp"
#include "trunclap/grid.hpp"
#include "trunclap/radial.hpp"

namespace trunclap {

// {"dim": 2, "body": {"type": "ball", ...}}; see README for the schema.
ConvexBody parse_domain(const nlohmann::json& j);
ConvexBody load_domain(const std::string& path);
nlohmann::json domain_to_json(const ConvexBody& body);

// Radial drift description: constant, affine c0 + c1 r, or a piecewise-linear table.
struct DriftSpec {
  enum class Kind { constant, affine, table };
  Kind kind = Kind::constant;
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<double> r, b;  // table
  Side sign = Side::plus;

  bool is_constant() const { return kind == Kind::constant; }
  ScalarFn function() const;
  ScalarFn derivative() const;
  Drift drift(const Vec& center = Vec()) const;
  DriftCoefficient radial(double R, int k, int N) const;
  std::string describe() const;
};

// number | "radial:r" | "radial:r-1" | "radial:affine:c0,c1" | path to a JSON file.
DriftSpec parse_drift_spec(const std::string& spec);
// number | path to a JSON file {"type": "constant", "value": v}.
double parse_forcing_spec(const std::string& spec);

void write_field_csv(const std::string& path, const Grid& g, const Eigen::VectorXd& u);
void write_text(const std::string& path, const std::string& content);
std::string format_double(double v);

}  // namespace trunclap
