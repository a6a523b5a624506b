#include "offwhite/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace offwhite {

GaussLegendre::GaussLegendre(int order) {
  if (order < 2) throw std::invalid_argument("GaussLegendre: order < 2");
  node.resize(order);
  weight.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    node[i] = -x;
    node[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weight[i] = w;
    weight[n - 1 - i] = w;
  }
}

double gl_panel(const std::function<double(double)>& f, double a, double b,
                const GaussLegendre& gl) {
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < gl.order(); ++i) {
    double v = f(m + h * gl.node[i]);
    if (!std::isfinite(v)) throw EvaluationFailure("integrand not finite");
    s += gl.weight[i] * v;
  }
  return h * s;
}

double log_panels(const std::function<double(double)>& f, double a, double b,
                  int panels_per_octave, const GaussLegendre& gl) {
  if (!(b > a)) return 0.0;
  if (!(a > 0.0)) throw std::invalid_argument("log_panels: a must be > 0");
  const double octaves = std::log2(b / a);
  const int n = std::max(1, static_cast<int>(std::ceil(octaves * panels_per_octave)));
  double s = 0.0;
  double lo = a;
  const double ratio = std::pow(b / a, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    double hi = (i + 1 == n) ? b : lo * ratio;
    s += gl_panel(f, lo, hi, gl);
    lo = hi;
  }
  return s;
}

double linear_panels(const std::function<double(double)>& f, double a, double b,
                     int panels, const GaussLegendre& gl) {
  if (!(b > a)) return 0.0;
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) s += gl_panel(f, a + i * h, a + (i + 1) * h, gl);
  return s;
}

const char* to_string(Finiteness v) {
  switch (v) {
    case Finiteness::Finite: return "Finite";
    case Finiteness::Divergent: return "Divergent";
    default: return "Inconclusive";
  }
}

const char* to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::Constant: return "constant";
    case GrowthModel::Log: return "log";
    case GrowthModel::PowerLaw: return "power";
    default: return "logpower";
  }
}

namespace {

struct LinFit {
  double intercept = 0.0, slope = 0.0, sse = 0.0, sst = 0.0;
};

// Least squares V ≈ a + c g with g pre-transformed; centered for conditioning.
LinFit linear_fit(std::span<const double> g, std::span<const double> v) {
  const size_t n = g.size();
  double gm = 0.0, vm = 0.0;
  for (size_t i = 0; i < n; ++i) {
    gm += g[i];
    vm += v[i];
  }
  gm /= n;
  vm /= n;
  double sgg = 0.0, sgv = 0.0, svv = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sgg += (g[i] - gm) * (g[i] - gm);
    sgv += (g[i] - gm) * (v[i] - vm);
    svv += (v[i] - vm) * (v[i] - vm);
  }
  LinFit r;
  r.sst = svv;
  if (sgg <= 0.0) {
    r.slope = 0.0;
    r.intercept = vm;
    r.sse = svv;
    return r;
  }
  r.slope = sgv / sgg;
  r.intercept = vm - r.slope * gm;
  r.sse = std::max(0.0, svv - r.slope * sgv);
  return r;
}

// SSE of the model a + c (base)^p, with base already ln L or L (normalized).
double sse_at(std::span<const double> base, std::span<const double> v, double p,
              LinFit* out = nullptr) {
  std::vector<double> g(base.size());
  for (size_t i = 0; i < base.size(); ++i) g[i] = std::pow(base[i], p);
  LinFit f = linear_fit(g, v);
  if (out) *out = f;
  return f.sse;
}

// Coarse grid then bounded golden-section refinement of p over [-3, 3] \ {0}.
double best_exponent(std::span<const double> base, std::span<const double> v) {
  double best_p = 1.0, best_sse = std::numeric_limits<double>::infinity();
  for (int sgn : {-1, 1}) {
    for (int i = 0; i < 120; ++i) {
      double p = sgn * (1e-3 + (3.0 - 1e-3) * i / 119.0);
      double s = sse_at(base, v, p);
      if (s < best_sse) {
        best_sse = s;
        best_p = p;
      }
    }
  }
  double lo = best_p - 0.03, hi = best_p + 0.03;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = sse_at(base, v, x1), f2 = sse_at(base, v, x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = sse_at(base, v, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = sse_at(base, v, x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GrowthFit fit_growth(std::span<const double> cutoffs,
                     std::span<const double> values, double tail_fraction) {
  if (cutoffs.size() != values.size() || cutoffs.size() < 6)
    throw std::invalid_argument("fit_growth: need >= 6 ladder points");
  size_t n0 = static_cast<size_t>(cutoffs.size() * (1.0 - tail_fraction));
  if (cutoffs.size() - n0 < 6) n0 = cutoffs.size() - 6;
  std::span<const double> L = cutoffs.subspan(n0);
  std::span<const double> V = values.subspan(n0);
  const size_t n = L.size();

  // Normalized abscissas keep powers of large cutoffs well conditioned.
  double lref = 0.0;
  for (double x : L) lref += std::log(x);
  lref = std::exp(lref / n);
  std::vector<double> lin(n), lg(n);
  for (size_t i = 0; i < n; ++i) {
    lin[i] = L[i] / lref;
    lg[i] = std::log(L[i]) / std::log(lref);
  }

  GrowthFit best;
  best.sse = std::numeric_limits<double>::infinity();
  double sst = 0.0;
  {
    double vm = 0.0;
    for (double x : V) vm += x;
    vm /= n;
    for (double x : V) sst += (x - vm) * (x - vm);
  }
  auto consider = [&](GrowthModel m, double p, const LinFit& f, double ref_scale) {
    GrowthFit g;
    g.model = m;
    g.exponent = p;
    // Undo the abscissa normalization: a + c (x/ref)^p = a + (c ref^-p) x^p.
    g.coefficient = f.slope / std::pow(ref_scale, p);
    g.intercept = f.intercept;
    g.sse = f.sse;
    g.quality = sst > 0.0 ? 1.0 - f.sse / sst : 1.0;
    if (g.sse < best.sse) best = g;
  };

  {  // pure log model: V = a + c ln L
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) g[i] = std::log(L[i]);
    LinFit f = linear_fit(g, V);
    consider(GrowthModel::Log, 1.0, f, 1.0);
  }
  {
    double p = best_exponent(lin, V);
    LinFit f;
    sse_at(lin, V, p, &f);
    consider(GrowthModel::PowerLaw, p, f, lref);
  }
  {
    double p = best_exponent(lg, V);
    LinFit f;
    sse_at(lg, V, p, &f);
    consider(GrowthModel::LogPower, p, f, std::log(lref));
  }

  // Prefer the plain log model when it is essentially as good.
  {
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) g[i] = std::log(L[i]);
    LinFit f = linear_fit(g, V);
    if (best.model != GrowthModel::Log && f.sse <= best.sse * 1.05 + 1e-300) {
      GrowthFit alt;
      alt.model = GrowthModel::Log;
      alt.exponent = 1.0;
      alt.coefficient = f.slope;
      alt.intercept = f.intercept;
      alt.sse = f.sse;
      alt.quality = sst > 0.0 ? 1.0 - f.sse / sst : 1.0;
      best = alt;
    }
  }

  // Degenerate spread: call it constant.
  double vmax = 0.0;
  for (double x : V) vmax = std::max(vmax, std::abs(x));
  if (sst <= 1e-24 * vmax * vmax + 1e-300) {
    best.model = GrowthModel::Constant;
    best.exponent = 0.0;
    best.coefficient = 0.0;
    best.intercept = V.back();
    best.quality = 1.0;
    best.sse = 0.0;
  }
  return best;
}

ConvergenceProbe assess_ladder(std::vector<double> cutoffs,
                               std::vector<double> values,
                               const LadderParams& p) {
  ConvergenceProbe probe;
  probe.cutoffs = std::move(cutoffs);
  probe.values = std::move(values);
  const auto& V = probe.values;
  const size_t n = V.size();
  if (n < 2) {
    probe.verdict = Finiteness::Inconclusive;
    probe.note = "ladder too short";
    return probe;
  }
  double scale = 0.0;
  for (double x : V) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) {
    probe.verdict = Finiteness::Finite;
    probe.value = 0.0;
    probe.error_bar = 0.0;
    probe.fit.model = GrowthModel::Constant;
    probe.fit.quality = 1.0;
    probe.note = "identically zero partials";
    return probe;
  }

  // Trailing-increment convergence with geometric tail extrapolation.
  bool settled = n >= static_cast<size_t>(p.trailing + 1);
  for (int i = 0; settled && i < p.trailing; ++i) {
    double dv = std::abs(V[n - 1 - i] - V[n - 2 - i]);
    if (dv > p.tau_rel * std::max(std::abs(V[n - 1 - i]), 1e-300)) settled = false;
  }
  if (settled) {
    double d1 = V[n - 1] - V[n - 2];
    double d0 = V[n - 2] - V[n - 3];
    double tail = 0.0;
    if (std::abs(d0) > 0.0) {
      double rho = d1 / d0;
      if (rho > 0.0 && rho < 0.95) tail = d1 * rho / (1.0 - rho);
    }
    probe.verdict = Finiteness::Finite;
    probe.value = V[n - 1] + tail;
    probe.error_bar = std::abs(tail) + std::abs(d1) + 1e-14 * scale;
    if (n >= 6) probe.fit = fit_growth(probe.cutoffs, V, p.tail_fit_fraction);
    probe.note = "trailing increments below tau_rel";
    return probe;
  }

  if (n < 6) {
    probe.verdict = Finiteness::Inconclusive;
    probe.note = "not settled and too few rungs to fit";
    return probe;
  }
  probe.fit = fit_growth(probe.cutoffs, V, p.tail_fit_fraction);
  const GrowthFit& f = probe.fit;
  const bool grows = (f.model == GrowthModel::Log && f.coefficient > 0.0) ||
                     ((f.model == GrowthModel::PowerLaw ||
                       f.model == GrowthModel::LogPower) &&
                      f.exponent > 0.0 && f.coefficient > 0.0);
  const bool converges = (f.model == GrowthModel::PowerLaw ||
                          f.model == GrowthModel::LogPower) &&
                         f.exponent < 0.0 && f.coefficient < 0.0;
  if (grows && f.quality >= p.q_min) {
    probe.verdict = Finiteness::Divergent;
    probe.note = "fitted growing model";
  } else if (converges && f.quality >= p.q_min) {
    probe.verdict = Finiteness::Finite;
    probe.value = f.intercept;
    probe.error_bar =
        std::abs(f.intercept - V[n - 1]) * 0.5 + 1e-12 * scale;
    probe.note = "fitted converging model; value extrapolated";
  } else {
    probe.verdict = Finiteness::Inconclusive;
    probe.note = "no adequate growth model";
  }
  return probe;
}

ConvergenceProbe probe_upper(const std::function<double(double)>& f, double a,
                             const LadderParams& p) {
  GaussLegendre gl(p.gl_order);
  std::vector<double> cutoffs(p.steps), values(p.steps);
  double acc = 0.0;
  double lo = a;
  for (int j = 0; j < p.steps; ++j) {
    double hi = p.lambda0 * std::pow(2.0, j);
    cutoffs[j] = hi;
    if (hi > lo) {
      if (lo <= 0.0) {
        acc += linear_panels(f, lo, hi, 16 * p.panels_per_octave, gl);
      } else {
        acc += log_panels(f, lo, hi, p.panels_per_octave, gl);
      }
      lo = hi;
    }
    values[j] = acc;
  }
  return assess_ladder(std::move(cutoffs), std::move(values), p);
}

ConvergenceProbe probe_lower(const std::function<double(double)>& f, double b,
                             const LadderParams& p) {
  GaussLegendre gl(p.gl_order);
  std::vector<double> cutoffs(p.steps), values(p.steps);
  double acc = 0.0;
  double hi = b;
  for (int j = 0; j < p.steps; ++j) {
    double eps = b * std::pow(2.0, -(j + 1));
    acc += log_panels(f, eps, hi, p.panels_per_octave, gl);
    hi = eps;
    cutoffs[j] = b / eps;
    values[j] = acc;
  }
  return assess_ladder(std::move(cutoffs), std::move(values), p);
}

}  // namespace offwhite
