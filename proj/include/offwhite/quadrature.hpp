#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace offwhite {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);
  int order() const { return static_cast<int>(node.size()); }
  std::vector<double> node;
  std::vector<double> weight;
};

/// ∫_a^b f on one panel.
double gl_panel(const std::function<double(double)>& f, double a, double b,
                const GaussLegendre& gl);

/// ∫_a^b f over geometrically spaced panels (0 < a < b). Panel count grows
/// with the number of octaves; suited to integrands smooth on log scale.
double log_panels(const std::function<double(double)>& f, double a, double b,
                  int panels_per_octave, const GaussLegendre& gl);

/// ∫_a^b f over uniformly spaced panels.
double linear_panels(const std::function<double(double)>& f, double a, double b,
                     int panels, const GaussLegendre& gl);

enum class Finiteness { Finite, Divergent, Inconclusive };

enum class GrowthModel { Constant, Log, PowerLaw, LogPower };

const char* to_string(Finiteness v);
const char* to_string(GrowthModel m);

/// Best-fit growth model for partial values V_j against cutoffs L_j:
///   V ≈ intercept + coefficient * g(L),
/// with g one of ln L, L^p, (ln L)^p. For Log the exponent is fixed at 1.
struct GrowthFit {
  GrowthModel model = GrowthModel::Constant;
  double exponent = 0.0;
  double coefficient = 0.0;
  double intercept = 0.0;
  double quality = 0.0;  // coefficient of determination on the fitted window
  double sse = 0.0;
};

struct LadderParams {
  double lambda0 = 16.0;       // first cutoff
  int steps = 16;              // ladder rungs, cutoffs lambda0 * 2^j
  double tau_rel = 1e-3;       // trailing relative-increment threshold
  int trailing = 3;            // increments inspected by the threshold
  double q_min = 0.98;         // fit quality required for a model verdict
  int panels_per_octave = 3;
  int gl_order = 8;
  double tail_fit_fraction = 0.5;  // portion of the ladder used by fit_growth
};

/// Evidence ladder for an improper integral: cutoffs, partial values, the
/// fitted growth model, and the resulting finiteness verdict. Verdicts are
/// heuristic by construction; the ladder is kept so reports can carry the
/// evidence.
struct ConvergenceProbe {
  std::vector<double> cutoffs;
  std::vector<double> values;
  GrowthFit fit;
  Finiteness verdict = Finiteness::Inconclusive;
  double value = 0.0;      // extrapolated value when Finite
  double error_bar = 0.0;  // |extrapolation - last partial| plus slack
  std::string note;
};

struct EvaluationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares fit of the growth-model family over the trailing portion of
/// the ladder. Requires at least 6 points.
GrowthFit fit_growth(std::span<const double> cutoffs,
                     std::span<const double> values,
                     double tail_fraction = 0.5);

/// Verdict assembly from a ladder of partial values. Finite either by
/// trailing-increment convergence (geometric extrapolation) or by a
/// converging fitted model (extrapolates to the intercept); Divergent by a
/// growing fitted model with adequate quality; otherwise Inconclusive.
ConvergenceProbe assess_ladder(std::vector<double> cutoffs,
                               std::vector<double> values,
                               const LadderParams& p);

/// Probe ∫_a^∞ f with cutoffs lambda0 * 2^j. The head [a, lambda0] is
/// included in the first rung (linear panels when a == 0). f must be
/// evaluable and nonnegative on the domain; a non-finite value raises
/// EvaluationFailure.
ConvergenceProbe probe_upper(const std::function<double(double)>& f, double a,
                             const LadderParams& p);

/// Probe ∫_0^b f with descending inner cutoffs eps_j = b * 2^-(j+1).
/// Recorded cutoffs are b / eps_j so the growth models read left to right.
ConvergenceProbe probe_lower(const std::function<double(double)>& f, double b,
                             const LadderParams& p);

}  // namespace offwhite
