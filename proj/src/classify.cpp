#include "offwhite/classify.hpp"

#include <algorithm>
#include <cmath>

namespace offwhite {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::OffWhite: return "OffWhite";
    case Outcome::NotOffWhite: return "NotOffWhite";
    case Outcome::Inconclusive: return "Inconclusive";
    default: return "Unsupported";
  }
}

namespace {

void check_zero_declaration(const std::vector<double>& zeros, int m) {
  if (static_cast<int>(zeros.size()) != m - 1)
    throw ZeroDeclarationInvalid("need exactly m-1 = " + std::to_string(m - 1) +
                                 " zero angles, got " +
                                 std::to_string(zeros.size()));
  const double tol = 1e-9;
  for (double z : zeros) {
    if (chord_sq(z, 0.0) < tol * tol)
      throw ZeroDeclarationInvalid("zero at angle 0 collides with the pole");
  }
  // Conjugation closure as multisets: every angle needs a partner at -angle.
  std::vector<bool> used(zeros.size(), false);
  for (size_t i = 0; i < zeros.size(); ++i) {
    if (used[i]) continue;
    if (chord_sq(zeros[i], -zeros[i]) < tol * tol) {
      used[i] = true;  // self-conjugate (angle 0 or pi)
      continue;
    }
    bool found = false;
    for (size_t j = i + 1; j < zeros.size(); ++j) {
      if (!used[j] && chord_sq(zeros[j], -zeros[i]) < tol * tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found)
      throw ZeroDeclarationInvalid("zero list not closed under conjugation");
  }
}

}  // namespace

CirclePhi log_remainder_phi(const Density& d, int m,
                            const std::vector<double>& zero_angles) {
  CirclePhi phi;
  auto zeros = zero_angles;
  phi.value = [d, m, zeros](double theta) {
    const double lambda = line_from_angle(theta);
    const double s = std::sin(0.5 * theta);
    const double one_minus = 4.0 * s * s;  // |1-z|^2
    // dmu/dL = W (1+lambda^2)/2; peel off |1-z|^{-2m} and the zero factors.
    const double log1pl2 = std::abs(lambda) > 1e150
                               ? 2.0 * std::log(std::abs(lambda))
                               : std::log1p(lambda * lambda);
    double v = d.log(lambda) + log1pl2 - std::log(2.0) + m * std::log(one_minus);
    for (double w : zeros) v -= std::log(chord_sq(theta, w));
    return v;
  };
  phi.rough_angles.push_back(0.0);
  for (double w : zeros) phi.rough_angles.push_back(w);
  return phi;
}

Verdict classify(const Density& d, const std::vector<double>& declared_zeros,
                 const ClassifyParams& params) {
  Verdict v;
  v.declared_zeros = declared_zeros;
  v.validation = validate(d);

  v.moderation_report = moderation_order(d, params.m_max, params.moderation);
  if (v.moderation_report.status == Finiteness::Inconclusive) {
    v.outcome = Outcome::Inconclusive;
    v.reason = "moderation probe inconclusive (declare a tail model)";
    return v;
  }
  if (v.moderation_report.not_moderate) {
    v.outcome = Outcome::Inconclusive;
    v.reason = "no finite moment probe up to m_max=" + std::to_string(params.m_max);
    return v;
  }
  const int m = v.moderation_report.order;
  v.moderation = m;

  if (m == 0) {
    v.outcome = Outcome::NotOffWhite;
    v.reason =
        "finite spectral measure (m = 0): the circle image has no pole at 1, "
        "so the past/future split cannot be of the required form";
    return v;
  }

  if (m == 1) {
    if (!declared_zeros.empty())
      throw ZeroDeclarationInvalid("m = 1 admits no zero declarations");
    FunctionalResult J;
    try {
      J = line_sobolev(make_view(d), params.sobolev);
    } catch (const EvaluationFailure& e) {
      v.outcome = Outcome::Inconclusive;
      v.reason = std::string("log-density evaluation failed: ") + e.what();
      return v;
    }
    v.decisive = J;
    switch (J.probe.verdict) {
      case Finiteness::Finite:
        v.outcome = Outcome::OffWhite;
        v.reason = "m = 1 and the log-density Sobolev functional is finite";
        break;
      case Finiteness::Divergent:
        v.outcome = Outcome::NotOffWhite;
        v.reason = "m = 1 but the log-density Sobolev functional diverges";
        break;
      default:
        v.outcome = Outcome::Inconclusive;
        v.reason = "Sobolev probe inconclusive: " + J.probe.note;
    }
    return v;
  }

  // m >= 2: the decomposition carries m-1 zeros away from angle 0; the
  // density determines them but no extraction procedure is attempted here.
  // For m = 2 conjugation symmetry forces the single zero to the unique
  // self-conjugate angle pi, so that case needs no declaration.
  std::vector<double> zeros = declared_zeros;
  if (zeros.empty() && m == 2) {
    zeros = {M_PI};
    v.declared_zeros = zeros;
  } else if (zeros.empty()) {
    v.outcome = Outcome::Unsupported;
    v.reason = "m = " + std::to_string(m) +
               " requires declaring the m-1 zero angles of the density";
    return v;
  }
  check_zero_declaration(zeros, m);
  CirclePhi phi = log_remainder_phi(d, m, zeros);
  FunctionalResult R;
  try {
    R = circle_double(phi, params.sobolev);
  } catch (const EvaluationFailure& e) {
    v.outcome = Outcome::Inconclusive;
    v.reason = std::string("remainder evaluation failed: ") + e.what();
    return v;
  }
  v.decisive = R;
  switch (R.probe.verdict) {
    case Finiteness::Finite:
      v.outcome = Outcome::OffWhite;
      v.reason = "log-remainder after removing declared zeros is in W^{1/2}";
      break;
    case Finiteness::Divergent:
      v.outcome = Outcome::NotOffWhite;
      v.reason = "log-remainder seminorm diverges for the declared zeros";
      break;
    default:
      v.outcome = Outcome::Inconclusive;
      v.reason = "circle seminorm probe inconclusive: " + R.probe.note;
  }
  return v;
}

CrossCheck circle_cross_check(const CircleDensity& pole_free, Verdict verdict,
                              const std::vector<int>& Ks) {
  CrossCheck cc;
  cc.sweep = hs_sweep(pole_free, Ks, 0);
  const bool cauchy = cc.sweep.cauchy_gap < 0.01;
  const bool log_growing =
      cc.sweep.hs_log_fit.rate > 0.0 && cc.sweep.hs_log_fit.quality >= 0.98;
  if (verdict.outcome == Outcome::OffWhite) {
    cc.consistent = cauchy;
    cc.note = cauchy ? "HS sums Cauchy-converge, matching OffWhite"
                     : "HS sums keep growing although the verdict is OffWhite";
  } else if (verdict.outcome == Outcome::NotOffWhite) {
    cc.consistent = log_growing;
    cc.note = log_growing
                  ? "HS sums grow like ln K, matching NotOffWhite"
                  : "HS sums do not show the expected growth for NotOffWhite";
  } else {
    cc.consistent = true;
    cc.note = "verdict undecided; sweep recorded without a consistency claim";
  }
  return cc;
}

CrossCheck verdict_cross_check(const Density& d, const Verdict& v,
                               const std::vector<int>& Ks) {
  if (v.moderation != 1)
    throw std::invalid_argument("cross-check is defined for m = 1 verdicts");
  CircleDensity mu = pushforward_density(d, 1);
  return circle_cross_check(mu.pole_removed(), v, Ks);
}

}  // namespace offwhite
