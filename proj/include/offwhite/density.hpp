#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace offwhite {

struct TabulatedOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotDifferentiable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Family { White, Power, LogPow, ExpLog, Rational, Tabulated, CircleDirect };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

/// Tail behaviour declared for tabulated densities; the tail continues the
/// last table value with the named family's shape.
struct TailModel {
  Family family = Family::Power;  // Power, LogPow or ExpLog
  double alpha = 0.0;
};

/// Declarative description of a symmetric density W on the real line.
/// Families defined only for large |lambda| are spliced below splice_radius:
/// constant below lambda0/2, cubic Hermite blend on [lambda0/2, lambda0]
/// matching value and first derivative at both joints.
struct DensitySpec {
  Family family = Family::White;
  double alpha = 0.0;
  double splice_radius = 0.0;  // 0 selects the family default
  std::vector<double> numerator;    // rational: coefficients in x = lambda^2
  std::vector<double> denominator;  // rational: coefficients in x = lambda^2
  std::vector<double> table_lambda;  // tabulated: ascending, lambda >= 0
  std::vector<double> table_w;
  std::vector<double> table_dw;  // optional derivative column
  std::optional<TailModel> tail;
  std::vector<double> phi_coefficients;  // circle_direct: w = exp(sum a_k cos k theta)
  int pole_multiplicity = 1;             // circle_direct

  static DensitySpec from_json(const nlohmann::ordered_json& j,
                               const std::filesystem::path& base_dir = {});
  static DensitySpec from_file(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

/// Validated, immutable evaluator for W, ln W and (ln W)'. Evaluation is
/// pure; instances are safe to share across threads.
class Density {
 public:
  explicit Density(DensitySpec spec);

  double operator()(double lambda) const;  // W(lambda)
  double log(double lambda) const;         // ln W(lambda)
  double dlog(double lambda) const;        // d/dlambda ln W, odd in lambda
  bool differentiable() const;

  /// lambda below which ln W is exactly constant, when the family has a
  /// flat core (spliced families; constant-extended tables).
  std::optional<double> constant_below() const;

  double splice_radius() const { return lambda0_; }
  const DensitySpec& spec() const { return spec_; }

 private:
  double family_value(double x) const;  // x = |lambda| >= lambda0
  double family_log(double x) const;
  double family_dlog(double x) const;  // in x, positive branch
  double tail_value(double x) const;
  double tail_dlog(double x) const;

  DensitySpec spec_;
  double lambda0_ = 0.0;
  double blend_value_ = 0.0;  // family value at lambda0, continued flat
  double blend_slope_ = 0.0;  // family derivative at lambda0
};

struct ValidationReport {
  bool symmetry_ok = true;
  bool positivity_ok = true;
  bool splice_c1_ok = true;
  double max_splice_mismatch = 0.0;
  std::string tail_model = "none";
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
  nlohmann::ordered_json to_json() const;
};

/// Symmetry, positivity and splice smoothness checks on a probe grid.
/// Failures are listed, never thrown.
ValidationReport validate(const Density& d);

}  // namespace offwhite
