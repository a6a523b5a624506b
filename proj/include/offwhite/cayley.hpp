#pragma once

#include <functional>
#include <vector>

#include "offwhite/density.hpp"
#include "offwhite/quadrature.hpp"

namespace offwhite {

struct PoleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleTooClose : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Angle of z = (lambda - i)/(lambda + i) on the unit circle, in (-pi, pi].
/// Strictly decreasing for lambda > 0 toward 0-, with theta(0) = pi.
double angle_from_line(double lambda);

/// Inverse map, lambda = -cot(theta/2).
double line_from_angle(double theta);

/// |1 - z(lambda)|^2 = 4 / (lambda^2 + 1).
double one_minus_z_sq(double lambda);

/// |e^{i a} - e^{i b}|^2 = 4 sin^2((a - b)/2), computed without cancellation.
double chord_sq(double a, double b);

/// Normalize an angle into (-pi, pi] without disturbing tiny values.
double wrap_angle(double theta);

struct CirclePoint {
  double angle = 0.0;
  int multiplicity = 1;
};

/// Density on the unit circle: a smooth part w(theta) together with declared
/// pole and zero factors,
///   dmu/dL(e^{i theta}) = w(theta) * prod |z - zero_j|^2 / prod |z - pole_i|^2
/// (multiplicities as exponents). Poles are carried symbolically; the full
/// density refuses evaluation within 1e-9 radians of a pole angle.
class CircleDensity {
 public:
  CircleDensity(std::function<double(double)> smooth,
                std::vector<CirclePoint> poles = {},
                std::vector<CirclePoint> zeros = {},
                std::vector<double> rough_angles = {});

  double smooth_at(double theta) const { return smooth_(theta); }
  double density_at(double theta) const;

  const std::vector<CirclePoint>& poles() const { return poles_; }
  const std::vector<CirclePoint>& zeros() const { return zeros_; }
  const std::vector<double>& rough_angles() const { return rough_; }
  int total_pole_multiplicity() const;

  /// Smooth part with all pole factors multiplied back in and all zero
  /// factors kept; a finite density when the declarations are honest.
  CircleDensity pole_removed() const;

  bool conjugation_symmetric(double tol = 1e-9) const;

 private:
  std::function<double(double)> smooth_;
  std::vector<CirclePoint> poles_;
  std::vector<CirclePoint> zeros_;
  std::vector<double> rough_;  // angles where the smooth part is not smooth
};

/// Image of the line density under the Cayley map with the pole factor of
/// order m split off: the smooth part satisfies
///   w_m(theta(lambda)) = 2 W(lambda) (4/(1+lambda^2))^{m-1},
/// so m = 1 reproduces w = 2W. A pole (angle 0, multiplicity m) is recorded
/// for m >= 1.
CircleDensity pushforward_density(const Density& d, int m);

struct ModerationReport {
  std::vector<ConvergenceProbe> probes;  // I_m for m = 0..last probed
  int order = -1;                        // least m with a Finite verdict
  Finiteness status = Finiteness::Inconclusive;
  bool not_moderate = false;             // nothing Finite up to m_max
};

/// Probe I_m = ∫ W(lambda) (1+lambda^2)^{-m} dlambda at geometric cutoffs for
/// m = 0.. until Finite (or m_max). Inconclusive probes propagate.
ModerationReport moderation_order(const Density& d, int m_max = 6,
                                  const LadderParams& params = {});

}  // namespace offwhite
