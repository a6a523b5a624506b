#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "offwhite/density.hpp"
#include "offwhite/quadrature.hpp"

namespace offwhite {

enum class FunctionalId { CircleDouble, CircleFourier, LineSobolev, Doubling, Derivative };

const char* to_string(FunctionalId id);

struct FunctionalResult {
  FunctionalId id;
  ConvergenceProbe probe;
  std::optional<double> value;  // set when the probe is Finite
  std::string kernel_note;      // decomposition used
};

/// Log-density view of a line density; functionals depend on W only through
/// ln W, so constants and positive scalings drop out where they should.
struct LineDensityView {
  std::function<double(double)> log_value;
  std::function<double(double)> dlog;
  bool differentiable = false;
  std::optional<double> flat_core;  // lambda below which ln W is constant
};

LineDensityView make_view(const Density& d);
LineDensityView scaled_view(const LineDensityView& v, double factor);    // factor * W
LineDensityView dilated_view(const LineDensityView& v, double factor);  // W(factor * lambda)

/// A function on the circle plus the angles where it fails to be smooth
/// (quadrature panels refine toward those points).
struct CirclePhi {
  std::function<double(double)> value;
  std::vector<double> rough_angles;
};

struct SobolevParams {
  LadderParams inner;   // dilation-difference integrals in lambda
  LadderParams outer;   // the u-integral, ladder in v = u - 1
  LadderParams circle;  // descending s-ladder of the circle double integral
  double diag_delta = 1e-3;   // half-width of the near-diagonal u-window
  double inner_floor = 1e-8;  // lambda floor when no flat core exists
  int fourier_k_min = 8;
  int fourier_k_max = 14;
  double fourier_tau = 1e-6;
  int circle_arc_po = 3;   // panels per octave toward rough angles
  int smooth_panels = 64;  // uniform panels when phi has no rough angles
  SobolevParams();
};

/// Σ_n |n| |phî_n|^2 on midpoint grids of doubling size; Inconclusive when
/// doubling still moves the sum.
FunctionalResult circle_fourier(const CirclePhi& phi, const SobolevParams& p = {});

/// Convenience wrapper; throws NotConverged instead of reporting.
double circle_fourier_seminorm(const std::function<double(double)>& phi,
                               const SobolevParams& p = {});

/// ∬ |phi(t1)-phi(t2)|^2 / |e^{it1}-e^{it2}|^2 dt1 dt2 via the
/// rotation-invariant reduction to 2 ∫_0^pi G(s)/(4 sin^2(s/2)) ds with
/// G(s) = ∫ |phi(t+s)-phi(t)|^2 dt, probed on a descending s-ladder.
FunctionalResult circle_double(const CirclePhi& phi, const SobolevParams& p = {});

/// D(u) = ∫_0^∞ |ln W(u l) - ln W(l)|^2 dl/l, the dilation-difference
/// integral; invariant under u -> 1/u.
ConvergenceProbe dilation_difference(const LineDensityView& v, double u,
                                     const SobolevParams& p = {});

/// J(W) = ∬_{R^2} |ln W(l1) - ln W(l2)|^2 / (l1 - l2)^2, folded onto
/// (0,∞)^2 by evenness and reduced to 4 ∫_1^∞ [(u-1)^{-2} + (u+1)^{-2}] D(u) du;
/// the window u in (1, 1+delta) uses the Taylor surrogate D ≈ Q ln^2 u when a
/// derivative is available and a descending sub-ladder otherwise.
FunctionalResult line_sobolev(const LineDensityView& v, const SobolevParams& p = {});

/// B(W) = ∫_0^∞ |ln W(2l) - ln W(l)|^2 dl/l = D(2).
FunctionalResult doubling_functional(const LineDensityView& v,
                                     const SobolevParams& p = {});

/// Q(W) = ∫_0^∞ |d/dl ln W|^2 l dl. Throws NotDifferentiable.
FunctionalResult derivative_functional(const LineDensityView& v,
                                       const SobolevParams& p = {});

/// One-way implications between the three verdicts; violations indicate
/// probe miscalibration and are reported, never thrown.
struct ImplicationReport {
  FunctionalResult line;
  FunctionalResult doubling;
  FunctionalResult derivative;
  bool sobolev_implies_doubling_ok = true;    // line Finite => doubling Finite
  bool derivative_implies_sobolev_ok = true;  // derivative Finite => line Finite
  std::vector<std::string> notes;
};

ImplicationReport check_implications(const LineDensityView& v,
                                     const SobolevParams& p = {});

}  // namespace offwhite
