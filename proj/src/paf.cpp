#include "offwhite/paf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offwhite/parallel.hpp"

namespace offwhite {

namespace {

struct ArcNodes {
  std::vector<double> theta;
  std::vector<double> weight;
};

// Quadrature nodes over one period: arcs between rough angles, panels
// refined toward the arc ends and capped at the oscillation scale h_osc.
ArcNodes period_nodes(const std::vector<double>& rough, double h_osc,
                      int po_rough, const GaussLegendre& gl) {
  ArcNodes out;
  auto emit_panel = [&](double a, double b) {
    const int parts = std::max(1, static_cast<int>(std::ceil((b - a) / h_osc)));
    for (int q = 0; q < parts; ++q) {
      const double pa = a + (b - a) * q / parts;
      const double pb = a + (b - a) * (q + 1) / parts;
      const double m = 0.5 * (pa + pb), h = 0.5 * (pb - pa);
      for (int i = 0; i < gl.order(); ++i) {
        out.theta.push_back(m + h * gl.node[i]);
        out.weight.push_back(h * gl.weight[i]);
      }
    }
  };
  auto emit_log_toward = [&](double from, double to, double eps) {
    // panels of [from+eps, to] refined toward `from` (from < to)
    const double len = to - from;
    if (len <= 2.0 * eps) return;
    const int n = std::max(1, static_cast<int>(std::ceil(
                                  std::log2(len / eps) * po_rough)));
    double lo = eps;
    const double ratio = std::pow(len / eps, 1.0 / n);
    for (int i = 0; i < n; ++i) {
      double hi = (i + 1 == n) ? len : lo * ratio;
      emit_panel(from + lo, from + hi);
      lo = hi;
    }
  };

  if (rough.empty()) {
    emit_panel(-M_PI, M_PI);
    return out;
  }
  std::vector<double> bps;
  for (double r : rough) bps.push_back(wrap_angle(r));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            bps.end());
  const size_t n = bps.size();
  for (size_t i = 0; i < n; ++i) {
    const double a = bps[i];
    const double len = (i + 1 < n ? bps[i + 1] : bps[0] + 2.0 * M_PI) - a;
    const double eps = len * 1e-13;
    const double half = 0.5 * len;
    emit_log_toward(a, a + half, eps);
    // mirrored panels toward the right end
    {
      const double from = a + len;
      const int parts = std::max(1, static_cast<int>(std::ceil(
                                        std::log2(half / eps) * po_rough)));
      double lo = eps;
      const double ratio = std::pow(half / eps, 1.0 / parts);
      for (int q = 0; q < parts; ++q) {
        double hi = (q + 1 == parts) ? half : lo * ratio;
        emit_panel(from - hi, from - lo);
        lo = hi;
      }
    }
  }
  return out;
}

std::vector<std::complex<double>> moments_on_nodes(const CircleDensity& d,
                                                   const ArcNodes& nodes,
                                                   int n_max) {
  std::vector<double> g(nodes.theta.size());
  for (size_t i = 0; i < nodes.theta.size(); ++i) {
    double v = d.density_at(wrap_angle(nodes.theta[i]));
    if (!std::isfinite(v)) throw EvaluationFailure("circle density not finite");
    g[i] = v * nodes.weight[i];
  }
  std::vector<std::complex<double>> c(n_max + 1);
  parallel_for(n_max + 1, [&](int n) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < g.size(); ++i)
      acc += g[i] * std::polar(1.0, -n * nodes.theta[i]);
    c[n] = acc;
  });
  return c;
}

}  // namespace

MomentTable moments(const CircleDensity& density, int n_max, double rel_tol) {
  if (!density.poles().empty())
    throw PoleMismatch("moments need a pole-free density");
  GaussLegendre gl(12);
  // Panel width resolving e^{i n theta} at order 12.
  double h_osc = M_PI * 6.0 / std::max(8, n_max);
  std::vector<std::complex<double>> prev;
  for (int pass = 0; pass < 5; ++pass) {
    ArcNodes nodes = period_nodes(density.rough_angles(), h_osc, 3, gl);
    auto cur = moments_on_nodes(density, nodes, n_max);
    if (!prev.empty()) {
      const double c0 = std::abs(cur[0]);
      double worst = 0.0;
      for (int n = 0; n <= n_max; ++n)
        worst = std::max(worst, std::abs(cur[n] - prev[n]));
      if (worst <= rel_tol * std::max(c0, 1e-300)) {
        MomentTable t;
        t.n_max = n_max;
        t.c.resize(2 * n_max + 1);
        for (int n = 0; n <= n_max; ++n) {
          t.c[static_cast<size_t>(n_max + n)] = cur[n];
          t.c[static_cast<size_t>(n_max - n)] = std::conj(cur[n]);
        }
        if (!(t.c0() > 0.0)) throw NumericalBreakdown("c_0 must be positive");
        return t;
      }
    }
    prev = std::move(cur);
    h_osc *= 0.5;
  }
  throw NotConverged("moments did not stabilize under grid refinement");
}

GramBlocks section_gram(const MomentTable& m, int K, int N) {
  const int need = 2 * K + std::abs(N) + 2;
  if (m.n_max < need)
    throw std::invalid_argument("moment table too small for section");
  GramBlocks b;
  b.K = K;
  b.N = N;
  const int n = K + 1;
  b.past.resize(n, n);
  b.future.resize(n, n);
  b.cross.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      b.past(j, k) = m.at(k - j);
      b.future(j, k) = m.at(k - j);
      b.cross(j, k) = m.at(N + 1 + k + K - j);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.past);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  b.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  b.ill_conditioned = !(b.condition < 1e12);
  return b;
}

namespace {

Eigen::MatrixXcd inverse_sqrt(const Eigen::MatrixXcd& G, bool* ridged) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  if (es.info() != Eigen::Success)
    throw NumericalBreakdown("eigendecomposition failed in whitening");
  Eigen::VectorXd ev = es.eigenvalues();
  const double tr = ev.sum();
  double ridge = 0.0;
  if (ev.minCoeff() < 1e-12 * tr) {
    ridge = 1e-12 * tr;
    if (ridged) *ridged = true;
  }
  Eigen::VectorXd d(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double x = ev[i] + ridge;
    if (!(x > 0.0)) throw NumericalBreakdown("Gram block not positive");
    d[i] = 1.0 / std::sqrt(x);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

SectionReport correlations_of(const Eigen::MatrixXcd& P,
                              const Eigen::MatrixXcd& F,
                              const Eigen::MatrixXcd& C, int K, int N,
                              bool ill);

SectionReport correlations_of(const Eigen::MatrixXcd& P,
                              const Eigen::MatrixXcd& F,
                              const Eigen::MatrixXcd& C, int K, int N,
                              bool ill) {
  bool ridged = false;
  Eigen::MatrixXcd M = inverse_sqrt(P, &ridged) * C * inverse_sqrt(F, &ridged);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M);
  if (es.info() != Eigen::Success)
    throw NumericalBreakdown("correlation eigenproblem failed");
  SectionReport r;
  r.K = K;
  r.N = N;
  r.ill_conditioned = ill || ridged;
  const auto& ev = es.eigenvalues();
  r.sigmas.resize(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    r.sigmas[static_cast<size_t>(ev.size() - 1 - i)] =
        std::sqrt(std::max(0.0, ev[i]));
  r.sigma1 = r.sigmas.empty() ? 0.0 : r.sigmas.front();
  r.hs_sum = std::accumulate(r.sigmas.begin(), r.sigmas.end(), 0.0,
                             [](double acc, double s) { return acc + s * s; });
  return r;
}

}  // namespace

SectionReport canonical_correlations(const GramBlocks& b) {
  return correlations_of(b.past, b.future, b.cross, b.K, b.N, b.ill_conditioned);
}

SectionReport block_correlations(const Eigen::MatrixXcd& past,
                                 const Eigen::MatrixXcd& future,
                                 const Eigen::MatrixXcd& cross) {
  return correlations_of(past, future, cross, 0, 0, false);
}

SweepReport hs_sweep(const CircleDensity& pole_free, const std::vector<int>& Ks,
                     int N) {
  if (!pole_free.poles().empty())
    throw PoleMismatch("hs_sweep expects a pole-free density");
  SweepReport rep;
  const int kmax = *std::max_element(Ks.begin(), Ks.end());
  MomentTable m = moments(pole_free, 2 * kmax + std::abs(N) + 4);
  rep.sections.resize(Ks.size());
  std::vector<int> ks = Ks;
  parallel_for(static_cast<int>(ks.size()), [&](int i) {
    rep.sections[static_cast<size_t>(i)] =
        canonical_correlations(section_gram(m, ks[static_cast<size_t>(i)], N));
  });
  const size_t n = rep.sections.size();
  if (n >= 2) {
    const double last = rep.sections[n - 1].hs_sum;
    rep.cauchy_gap = last > 0.0
                         ? std::abs(last - rep.sections[n - 2].hs_sum) / last
                         : 0.0;
  }
  if (n >= 3) {
    // Least squares HS ~ a + rate ln K.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& s : rep.sections) {
      const double x = std::log(static_cast<double>(s.K));
      sx += x;
      sy += s.hs_sum;
      sxx += x * x;
      sxy += x * s.hs_sum;
      syy += s.hs_sum * s.hs_sum;
    }
    const double nn = static_cast<double>(n);
    const double den = nn * sxx - sx * sx;
    rep.hs_log_fit.rate = (nn * sxy - sx * sy) / den;
    rep.hs_log_fit.intercept = (sy - rep.hs_log_fit.rate * sx) / nn;
    const double sst = syy - sy * sy / nn;
    double sse = 0.0;
    for (const auto& s : rep.sections) {
      const double pred = rep.hs_log_fit.intercept +
                          rep.hs_log_fit.rate * std::log(static_cast<double>(s.K));
      sse += (s.hs_sum - pred) * (s.hs_sum - pred);
    }
    rep.hs_log_fit.quality = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  }
  return rep;
}

namespace {

AngleEvidence decide_angle(const MomentTable& m, const std::vector<int>& Ks,
                           int k, const AngleThresholds& thr) {
  AngleEvidence ev;
  ev.k = k;
  for (int K : Ks) {
    SectionReport r = canonical_correlations(section_gram(m, K, k));
    ev.sigma1_by_K.push_back(r.sigma1);
  }
  ev.sigma1_last = ev.sigma1_by_K.back();
  const double smax = *std::max_element(ev.sigma1_by_K.begin(), ev.sigma1_by_K.end());
  if (smax <= 1.0 - thr.delta_angle) {
    ev.decision = AngleDecision::Pass;
    ev.sigma_extrapolated = smax;
    return ev;
  }
  if (ev.sigma1_last >= 1.0 - thr.delta_close) {
    ev.decision = AngleDecision::Fail;
    ev.sigma_extrapolated = 1.0;
    return ev;
  }
  // Trend of the gap: 1 - sigma1 ~ c K^slope closing to zero.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const size_t n = Ks.size();
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(Ks[i]));
    const double y = std::log(std::max(1e-300, 1.0 - ev.sigma1_by_K[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  ev.trend_slope = (nn * sxy - sx * sy) / den;
  const double a = (sy - ev.trend_slope * sx) / nn;
  const double sst = syy - sy * sy / nn;
  double sse = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(Ks[i]));
    const double y = std::log(std::max(1e-300, 1.0 - ev.sigma1_by_K[i]));
    sse += (y - (a + ev.trend_slope * x)) * (y - (a + ev.trend_slope * x));
  }
  ev.trend_quality = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  if (ev.trend_slope <= thr.trend_slope && ev.trend_quality >= thr.trend_quality) {
    ev.decision = AngleDecision::Fail;
    ev.sigma_extrapolated = 1.0;
  } else {
    ev.decision = AngleDecision::Undecided;
    ev.sigma_extrapolated = ev.sigma1_last;
  }
  return ev;
}

}  // namespace

IndexEstimate index_estimate(const CircleDensity& density,
                             const std::vector<int>& Ks, int k_lo, int k_hi,
                             const AngleThresholds& thr) {
  IndexEstimate est;
  const int shift = density.total_pole_multiplicity();
  CircleDensity nu = density.pole_removed();
  if (shift > 0)
    est.notes.push_back("poles removed; window shifted by total multiplicity " +
                        std::to_string(shift));
  const int kmax = *std::max_element(Ks.begin(), Ks.end());
  const int reach = std::max(std::abs(k_lo + shift), std::abs(k_hi + shift));
  MomentTable m = moments(nu, 2 * kmax + reach + 4);

  for (int k = k_lo; k <= k_hi; ++k) {
    AngleEvidence ev = decide_angle(m, Ks, k + shift, thr);
    ev.k = k;
    est.window.push_back(ev);
  }
  for (size_t i = 0; i < est.window.size(); ++i) {
    if (est.window[i].decision == AngleDecision::Pass) {
      est.index = est.window[i].k;
      if (i == 0)
        est.notes.push_back("window lower edge passes; index may be smaller");
      break;
    }
  }
  bool seen_pass = false;
  for (const auto& ev : est.window) {
    if (ev.decision == AngleDecision::Pass) seen_pass = true;
    else if (seen_pass)
      est.notes.push_back("monotonicity violation at k=" + std::to_string(ev.k));
    if (ev.decision == AngleDecision::Undecided)
      est.notes.push_back("undecided at k=" + std::to_string(ev.k));
  }
  return est;
}

CircleDensity multiply_by_chord_sq(const CircleDensity& density, double angle) {
  const double a = wrap_angle(angle);
  std::vector<CirclePoint> poles;
  bool cancelled = false;
  for (const auto& p : density.poles()) {
    if (!cancelled && chord_sq(p.angle, a) < 1e-24) {
      cancelled = true;
      if (p.multiplicity > 1) poles.push_back({p.angle, p.multiplicity - 1});
    } else {
      poles.push_back(p);
    }
  }
  std::vector<CirclePoint> zeros = density.zeros();
  if (!cancelled) {
    bool merged = false;
    for (auto& z : zeros)
      if (chord_sq(z.angle, a) < 1e-24) {
        ++z.multiplicity;
        merged = true;
        break;
      }
    if (!merged) zeros.push_back({a, 1});
  }
  auto smooth = [d = density](double theta) { return d.smooth_at(theta); };
  return CircleDensity(smooth, std::move(poles), std::move(zeros),
                       density.rough_angles());
}

ShiftLawReport shift_law_check(const CircleDensity& density, double z0_angle,
                               const std::vector<int>& Ks, int k_lo, int k_hi,
                               const AngleThresholds& thr) {
  ShiftLawReport rep;
  rep.base = index_estimate(density, Ks, k_lo, k_hi, thr);
  CircleDensity shifted = multiply_by_chord_sq(density, z0_angle);
  rep.shifted = index_estimate(shifted, Ks, k_lo, k_hi + 1, thr);
  if (rep.base.index && rep.shifted.index) {
    rep.law_holds = (*rep.shifted.index == *rep.base.index + 1);
    rep.note = rep.law_holds ? "index shifted by one" : "index shift law violated";
  } else {
    rep.note = "undecided index in the window";
  }
  return rep;
}

TimeReversalReport time_reversal_check(const CircleDensity& density, int K, int N) {
  TimeReversalReport rep;
  CircleDensity nu = density.pole_removed();
  MomentTable m = moments(nu, 2 * K + std::abs(N) + 4);
  rep.forward = canonical_correlations(section_gram(m, K, N));

  // Reversed pair (F_0, P_{-N-1}): bases z^j (0 <= j <= K) and
  // z^{-N-1-K+l} (0 <= l <= K).
  const int n = K + 1;
  Eigen::MatrixXcd P(n, n), F(n, n), C(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      P(j, k) = m.at(k - j);
      F(j, k) = m.at(k - j);
      C(j, k) = m.at((-N - 1 - K + k) - j);
    }
  rep.reversed = correlations_of(P, F, C, K, N, false);
  double gap = 0.0;
  for (size_t i = 0; i < rep.forward.sigmas.size(); ++i)
    gap = std::max(gap, std::abs(rep.forward.sigmas[i] - rep.reversed.sigmas[i]));
  rep.max_sigma_gap = gap;
  return rep;
}

}  // namespace offwhite
