#include "offwhite/cayley.hpp"

#include <cmath>

namespace offwhite {

double angle_from_line(double lambda) {
  // z = (lambda^2 - 1 - 2 i lambda) / (lambda^2 + 1)
  return std::atan2(-2.0 * lambda, lambda * lambda - 1.0);
}

double line_from_angle(double theta) {
  return -std::cos(0.5 * theta) / std::sin(0.5 * theta);
}

double one_minus_z_sq(double lambda) { return 4.0 / (lambda * lambda + 1.0); }

double chord_sq(double a, double b) {
  const double s = std::sin(0.5 * (a - b));
  return 4.0 * s * s;
}

double wrap_angle(double theta) {
  if (theta > M_PI) {
    do theta -= 2.0 * M_PI;
    while (theta > M_PI);
  } else if (theta <= -M_PI) {
    do theta += 2.0 * M_PI;
    while (theta <= -M_PI);
  }
  return theta;
}

CircleDensity::CircleDensity(std::function<double(double)> smooth,
                             std::vector<CirclePoint> poles,
                             std::vector<CirclePoint> zeros,
                             std::vector<double> rough)
    : smooth_(std::move(smooth)),
      poles_(std::move(poles)),
      zeros_(std::move(zeros)),
      rough_(std::move(rough)) {
  for (const auto& p : poles_)
    if (p.multiplicity < 1) throw PoleMismatch("pole multiplicity must be >= 1");
  for (const auto& z : zeros_)
    if (z.multiplicity < 1) throw PoleMismatch("zero multiplicity must be >= 1");
}

double CircleDensity::density_at(double theta) const {
  double v = smooth_(theta);
  for (const auto& p : poles_) {
    const double c = chord_sq(theta, p.angle);
    if (c < 1e-18) throw PoleTooClose("evaluation within 1e-9 rad of a pole");
    v /= std::pow(c, p.multiplicity);
  }
  for (const auto& z : zeros_) v *= std::pow(chord_sq(theta, z.angle), z.multiplicity);
  return v;
}

int CircleDensity::total_pole_multiplicity() const {
  int m = 0;
  for (const auto& p : poles_) m += p.multiplicity;
  return m;
}

CircleDensity CircleDensity::pole_removed() const {
  auto smooth = smooth_;
  auto zeros = zeros_;
  auto value = [smooth, zeros](double theta) {
    double v = smooth(theta);
    for (const auto& z : zeros) v *= std::pow(chord_sq(theta, z.angle), z.multiplicity);
    return v;
  };
  return CircleDensity(value, {}, {}, rough_);
}

bool CircleDensity::conjugation_symmetric(double tol) const {
  for (int i = 0; i < 64; ++i) {
    double th = (i + 0.5) * M_PI / 64.0;
    double a = smooth_(th), b = smooth_(-th);
    if (std::abs(a - b) > tol * std::max({std::abs(a), std::abs(b), 1e-30}))
      return false;
  }
  auto closed = [&](const std::vector<CirclePoint>& pts) {
    for (const auto& p : pts) {
      bool found = false;
      for (const auto& q : pts) {
        if (q.multiplicity == p.multiplicity &&
            chord_sq(q.angle, -p.angle) < tol * tol)
          found = true;
      }
      if (!found) return false;
    }
    return true;
  };
  return closed(poles_) && closed(zeros_);
}

CircleDensity pushforward_density(const Density& d, int m) {
  if (m < 0) throw PoleMismatch("moderation order must be >= 0");
  auto smooth = [d, m](double theta) {
    const double lambda = line_from_angle(theta);
    // 2 W(lambda) (4/(1+lambda^2))^{m-1}; use |1-z|^2 = 4 sin^2(theta/2)
    // directly, which stays accurate for theta near 0.
    const double s = std::sin(0.5 * theta);
    return 2.0 * std::exp(d.log(lambda)) * std::pow(4.0 * s * s, m - 1);
  };
  std::vector<CirclePoint> poles;
  if (m >= 1) poles.push_back({0.0, m});
  std::vector<double> rough = {0.0};
  return CircleDensity(smooth, std::move(poles), {}, std::move(rough));
}

ModerationReport moderation_order(const Density& d, int m_max,
                                  const LadderParams& params) {
  ModerationReport report;
  for (int m = 0; m <= m_max; ++m) {
    auto integrand = [&d, m](double lambda) {
      return 2.0 * d(lambda) * std::pow(1.0 + lambda * lambda, -m);
    };
    ConvergenceProbe probe;
    try {
      probe = probe_upper(integrand, 0.0, params);
    } catch (const TabulatedOutOfRange& e) {
      probe.verdict = Finiteness::Inconclusive;
      probe.note = std::string("tail model missing: ") + e.what();
    } catch (const EvaluationFailure& e) {
      probe.verdict = Finiteness::Inconclusive;
      probe.note = e.what();
    }
    report.probes.push_back(probe);
    if (probe.verdict == Finiteness::Finite) {
      report.order = m;
      report.status = Finiteness::Finite;
      return report;
    }
    if (probe.verdict == Finiteness::Inconclusive) {
      report.status = Finiteness::Inconclusive;
      return report;
    }
  }
  report.not_moderate = true;
  report.status = Finiteness::Divergent;
  return report;
}

}  // namespace offwhite
