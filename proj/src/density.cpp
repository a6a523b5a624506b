#include "offwhite/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace offwhite {

const char* to_string(Family f) {
  switch (f) {
    case Family::White: return "white";
    case Family::Power: return "power";
    case Family::LogPow: return "logpow";
    case Family::ExpLog: return "explog";
    case Family::Rational: return "rational";
    case Family::Tabulated: return "tabulated";
    default: return "circle_direct";
  }
}

Family family_from_string(const std::string& s) {
  if (s == "white") return Family::White;
  if (s == "power") return Family::Power;
  if (s == "logpow") return Family::LogPow;
  if (s == "explog") return Family::ExpLog;
  if (s == "rational") return Family::Rational;
  if (s == "tabulated") return Family::Tabulated;
  if (s == "circle_direct") return Family::CircleDirect;
  throw SpecError("unknown family: " + s);
}

namespace {

double default_splice_radius(Family f) {
  switch (f) {
    case Family::Power: return 2.0;
    case Family::LogPow: return M_E * M_E;  // keeps ln ln positive
    case Family::ExpLog: return M_E;
    default: return 0.0;
  }
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

double poly_deriv_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 1;) v = v * x + c[i] * i;
  return v;
}

void load_table_csv(const std::filesystem::path& p, DensitySpec& spec) {
  std::ifstream in(p);
  if (!in) throw SpecError("cannot open table: " + p.string());
  std::string line;
  if (!std::getline(in, line)) throw SpecError("empty table: " + p.string());
  bool has_dw = line.find("dW") != std::string::npos;
  if (line.rfind("lambda", 0) != 0)
    throw SpecError("table header must be lambda,W[,dW]: " + p.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double vals[3] = {0, 0, 0};
    int k = 0;
    while (std::getline(row, cell, ',') && k < 3) vals[k++] = std::stod(cell);
    if (k < 2) throw SpecError("bad table row: " + line);
    spec.table_lambda.push_back(vals[0]);
    spec.table_w.push_back(vals[1]);
    if (has_dw) spec.table_dw.push_back(k >= 3 ? vals[2] : 0.0);
  }
  if (!std::is_sorted(spec.table_lambda.begin(), spec.table_lambda.end()))
    throw SpecError("table must be sorted ascending in lambda");
  if (!spec.table_lambda.empty() && spec.table_lambda.front() < 0.0)
    throw SpecError("table rows must have lambda >= 0");
}

}  // namespace

DensitySpec DensitySpec::from_json(const nlohmann::ordered_json& j,
                                   const std::filesystem::path& base_dir) {
  static const std::vector<std::string> known = {
      "family", "alpha", "splice_radius", "numerator", "denominator",
      "table", "table_lambda", "table_w", "table_dw", "tail",
      "phi_coefficients", "pole_multiplicity"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw SpecError("unknown key in density spec: " + it.key());
  }
  DensitySpec s;
  s.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("splice_radius")) s.splice_radius = j.at("splice_radius").get<double>();
  if (j.contains("numerator")) s.numerator = j.at("numerator").get<std::vector<double>>();
  if (j.contains("denominator")) s.denominator = j.at("denominator").get<std::vector<double>>();
  if (j.contains("table")) {
    auto path = std::filesystem::path(j.at("table").get<std::string>());
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    load_table_csv(path, s);
  }
  if (j.contains("table_lambda")) {
    s.table_lambda = j.at("table_lambda").get<std::vector<double>>();
    s.table_w = j.at("table_w").get<std::vector<double>>();
    if (j.contains("table_dw")) s.table_dw = j.at("table_dw").get<std::vector<double>>();
  }
  if (j.contains("tail")) {
    TailModel t;
    t.family = family_from_string(j.at("tail").at("type").get<std::string>());
    t.alpha = j.at("tail").at("alpha").get<double>();
    s.tail = t;
  }
  if (j.contains("phi_coefficients"))
    s.phi_coefficients = j.at("phi_coefficients").get<std::vector<double>>();
  if (j.contains("pole_multiplicity"))
    s.pole_multiplicity = j.at("pole_multiplicity").get<int>();
  return s;
}

DensitySpec DensitySpec::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec: " + path.string());
  nlohmann::ordered_json j;
  in >> j;
  return from_json(j, path.parent_path());
}

nlohmann::ordered_json DensitySpec::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = to_string(family);
  if (family == Family::Power || family == Family::LogPow || family == Family::ExpLog) {
    j["alpha"] = alpha;
    j["splice_radius"] = splice_radius;
  }
  if (family == Family::Rational) {
    j["numerator"] = numerator;
    j["denominator"] = denominator;
  }
  if (family == Family::Tabulated) {
    j["table_lambda"] = table_lambda;
    j["table_w"] = table_w;
    if (!table_dw.empty()) j["table_dw"] = table_dw;
  }
  if (tail) {
    j["tail"] = {{"type", to_string(tail->family)}, {"alpha", tail->alpha}};
  }
  if (family == Family::CircleDirect) {
    j["phi_coefficients"] = phi_coefficients;
    j["pole_multiplicity"] = pole_multiplicity;
  }
  return j;
}

Density::Density(DensitySpec spec) : spec_(std::move(spec)) {
  lambda0_ = spec_.splice_radius > 0.0 ? spec_.splice_radius
                                       : default_splice_radius(spec_.family);
  spec_.splice_radius = lambda0_;
  switch (spec_.family) {
    case Family::Power:
    case Family::LogPow:
    case Family::ExpLog: {
      if (lambda0_ <= 0.0) throw SpecError("splice_radius must be positive");
      if (spec_.family == Family::LogPow && std::log(lambda0_) <= 0.0)
        throw SpecError("logpow needs splice_radius > 1");
      if (spec_.family == Family::ExpLog && spec_.alpha <= 0.0)
        throw SpecError("explog needs alpha > 0");
      blend_value_ = family_value(lambda0_);
      blend_slope_ = blend_value_ * family_dlog(lambda0_);
      // The Hermite blend dips at most ~0.148 (b-a) |W'(b)| below W(b).
      if (blend_value_ - 0.149 * (lambda0_ / 2.0) * std::abs(blend_slope_) <= 0.0)
        throw SpecError("splice would not stay positive; adjust splice_radius");
      break;
    }
    case Family::Rational:
      if (spec_.numerator.empty() || spec_.denominator.empty())
        throw SpecError("rational needs numerator and denominator");
      break;
    case Family::Tabulated:
      if (spec_.table_lambda.size() < 2)
        throw SpecError("tabulated needs at least two rows");
      if (!spec_.table_dw.empty() &&
          spec_.table_dw.size() != spec_.table_lambda.size())
        throw SpecError("dW column length mismatch");
      break;
    case Family::CircleDirect:
      if (spec_.pole_multiplicity < 0)
        throw SpecError("pole_multiplicity must be >= 0");
      break;
    default:
      break;
  }
}

double Density::family_value(double x) const {
  switch (spec_.family) {
    case Family::Power: return std::pow(x, spec_.alpha);
    case Family::LogPow: return std::pow(std::log(x), spec_.alpha);
    case Family::ExpLog: return std::exp(-std::pow(std::log(x), spec_.alpha));
    default: return 1.0;
  }
}

double Density::family_log(double x) const {
  switch (spec_.family) {
    case Family::Power: return spec_.alpha * std::log(x);
    case Family::LogPow: return spec_.alpha * std::log(std::log(x));
    case Family::ExpLog: return -std::pow(std::log(x), spec_.alpha);
    default: return 0.0;
  }
}

double Density::family_dlog(double x) const {
  switch (spec_.family) {
    case Family::Power: return spec_.alpha / x;
    case Family::LogPow: return spec_.alpha / (x * std::log(x));
    case Family::ExpLog:
      return -spec_.alpha * std::pow(std::log(x), spec_.alpha - 1.0) / x;
    default: return 0.0;
  }
}

double Density::tail_value(double x) const {
  const double edge = spec_.table_lambda.back();
  const double wedge = spec_.table_w.back();
  if (!spec_.tail)
    throw TabulatedOutOfRange("lambda beyond table and no tail model");
  auto shape = [&](double t) -> double {
    switch (spec_.tail->family) {
      case Family::Power: return spec_.tail->alpha * std::log(t);
      case Family::LogPow: return spec_.tail->alpha * std::log(std::log(t));
      case Family::ExpLog: return -std::pow(std::log(t), spec_.tail->alpha);
      default: throw SpecError("tail type must be power/logpow/explog");
    }
  };
  return wedge * std::exp(shape(x) - shape(edge));
}

double Density::tail_dlog(double x) const {
  if (!spec_.tail)
    throw TabulatedOutOfRange("lambda beyond table and no tail model");
  switch (spec_.tail->family) {
    case Family::Power: return spec_.tail->alpha / x;
    case Family::LogPow: return spec_.tail->alpha / (x * std::log(x));
    case Family::ExpLog:
      return -spec_.tail->alpha * std::pow(std::log(x), spec_.tail->alpha - 1.0) / x;
    default: throw SpecError("tail type must be power/logpow/explog");
  }
}

double Density::operator()(double lambda) const {
  const double x = std::abs(lambda);
  switch (spec_.family) {
    case Family::White:
      return 1.0;
    case Family::Power:
    case Family::LogPow:
    case Family::ExpLog: {
      if (x >= lambda0_) return family_value(x);
      const double a = lambda0_ / 2.0, b = lambda0_;
      if (x <= a) return blend_value_;
      const double t = (x - a) / (b - a);
      return blend_value_ + (b - a) * blend_slope_ * (t * t * t - t * t);
    }
    case Family::Rational: {
      const double u = x * x;
      const double den = poly_eval(spec_.denominator, u);
      if (den == 0.0) throw NonPositive("rational denominator vanishes");
      return poly_eval(spec_.numerator, u) / den;
    }
    case Family::Tabulated: {
      const auto& L = spec_.table_lambda;
      const auto& W = spec_.table_w;
      if (x > L.back()) return tail_value(x);
      if (x <= L.front()) {
        if (W.front() <= 0.0) throw NonPositive("tabulated value <= 0");
        return W.front();
      }
      size_t i = std::upper_bound(L.begin(), L.end(), x) - L.begin() - 1;
      i = std::min(i, L.size() - 2);
      const double h = L[i + 1] - L[i];
      const double t = (x - L[i]) / h;
      double v;
      if (spec_.table_dw.empty()) {
        v = W[i] * (1.0 - t) + W[i + 1] * t;
      } else {
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        v = h00 * W[i] + h10 * h * spec_.table_dw[i] + h01 * W[i + 1] +
            h11 * h * spec_.table_dw[i + 1];
      }
      if (v <= 0.0) throw NonPositive("tabulated value <= 0");
      return v;
    }
    case Family::CircleDirect:
      return std::exp(log(lambda));
  }
  return 1.0;
}

double Density::log(double lambda) const {
  const double x = std::abs(lambda);
  switch (spec_.family) {
    case Family::White:
      return 0.0;
    case Family::Power:
    case Family::LogPow:
    case Family::ExpLog:
      if (x >= lambda0_) return family_log(x);
      return std::log((*this)(x));
    case Family::Rational: {
      const double u = x * x;
      return std::log(poly_eval(spec_.numerator, u)) -
             std::log(poly_eval(spec_.denominator, u));
    }
    case Family::Tabulated:
      return std::log((*this)(x));
    case Family::CircleDirect: {
      // dmu/dL = w(z)/|1-z|^{2m} pulled back through the Cayley map:
      // W(lambda) = w(theta) * 2 (1+lambda^2)^{m-1} / 4^m.
      const double theta = std::atan2(-2.0 * lambda, lambda * lambda - 1.0);
      double phi = 0.0;
      for (size_t k = 0; k < spec_.phi_coefficients.size(); ++k)
        phi += spec_.phi_coefficients[k] * std::cos(k * theta);
      const int m = spec_.pole_multiplicity;
      const double log1pl2 = std::abs(lambda) > 1e150
                                 ? 2.0 * std::log(std::abs(lambda))
                                 : std::log1p(lambda * lambda);
      return phi + std::log(2.0) + (m - 1) * log1pl2 - m * std::log(4.0);
    }
  }
  return 0.0;
}

double Density::dlog(double lambda) const {
  const double s = lambda > 0.0 ? 1.0 : (lambda < 0.0 ? -1.0 : 0.0);
  const double x = std::abs(lambda);
  switch (spec_.family) {
    case Family::White:
      return 0.0;
    case Family::Power:
    case Family::LogPow:
    case Family::ExpLog: {
      if (x >= lambda0_) return s * family_dlog(x);
      const double a = lambda0_ / 2.0, b = lambda0_;
      if (x <= a) return 0.0;
      const double t = (x - a) / (b - a);
      const double H = blend_value_ + (b - a) * blend_slope_ * (t * t * t - t * t);
      const double dH = blend_slope_ * (3.0 * t * t - 2.0 * t);
      return s * dH / H;
    }
    case Family::Rational: {
      const double u = x * x;
      const double P = poly_eval(spec_.numerator, u);
      const double Q = poly_eval(spec_.denominator, u);
      return 2.0 * lambda *
             (poly_deriv_eval(spec_.numerator, u) / P -
              poly_deriv_eval(spec_.denominator, u) / Q);
    }
    case Family::Tabulated: {
      if (spec_.table_dw.empty())
        throw NotDifferentiable("tabulated spec lacks a derivative column");
      const auto& L = spec_.table_lambda;
      if (x > L.back()) return s * tail_dlog(x);
      if (x <= L.front()) return 0.0;
      size_t i = std::upper_bound(L.begin(), L.end(), x) - L.begin() - 1;
      i = std::min(i, L.size() - 2);
      const double h = L[i + 1] - L[i];
      const double t = (x - L[i]) / h;
      const double dh00 = 6 * t * (t - 1) / h;
      const double dh10 = (3 * t * t - 4 * t + 1) / h;
      const double dh01 = -6 * t * (t - 1) / h;
      const double dh11 = (3 * t * t - 2 * t) / h;
      const double dv = dh00 * spec_.table_w[i] + dh10 * h * spec_.table_dw[i] +
                        dh01 * spec_.table_w[i + 1] +
                        dh11 * h * spec_.table_dw[i + 1];
      return s * dv / (*this)(x);
    }
    case Family::CircleDirect: {
      const double theta = std::atan2(-2.0 * lambda, lambda * lambda - 1.0);
      double dphi = 0.0;
      for (size_t k = 1; k < spec_.phi_coefficients.size(); ++k)
        dphi -= spec_.phi_coefficients[k] * k * std::sin(k * theta);
      const double dtheta = 2.0 / (1.0 + lambda * lambda);
      const int m = spec_.pole_multiplicity;
      return dphi * dtheta + (m - 1) * 2.0 * lambda / (1.0 + lambda * lambda);
    }
  }
  return 0.0;
}

bool Density::differentiable() const {
  return !(spec_.family == Family::Tabulated && spec_.table_dw.empty());
}

std::optional<double> Density::constant_below() const {
  switch (spec_.family) {
    case Family::Power:
    case Family::LogPow:
    case Family::ExpLog:
      return lambda0_ / 2.0;
    case Family::Tabulated:
      return spec_.table_lambda.front() > 0.0
                 ? std::optional<double>(spec_.table_lambda.front())
                 : std::nullopt;
    default:
      return std::nullopt;
  }
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["symmetry_ok"] = symmetry_ok;
  j["positivity_ok"] = positivity_ok;
  j["splice_c1_ok"] = splice_c1_ok;
  j["max_splice_mismatch"] = max_splice_mismatch;
  j["tail_model"] = tail_model;
  j["failures"] = failures;
  j["passed"] = passed();
  return j;
}

ValidationReport validate(const Density& d) {
  ValidationReport r;
  const auto& spec = d.spec();
  if (spec.family == Family::Tabulated)
    r.tail_model = spec.tail ? to_string(spec.tail->family) : "none";

  // Symmetric probe grid, log-spaced over the working range.
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i)
    grid.push_back(1e-3 * std::pow(10.0, 8.0 * i / 199.0));
  if (spec.family == Family::Tabulated) {
    grid.clear();
    const double hi = spec.tail ? 10.0 * spec.table_lambda.back()
                                : spec.table_lambda.back();
    for (int i = 0; i < 200; ++i)
      grid.push_back(spec.table_lambda.front() +
                     (hi - spec.table_lambda.front()) * i / 199.0);
  }
  for (double x : grid) {
    try {
      double wp = d(x), wm = d(-x);
      if (std::abs(wp - wm) > 1e-12 * std::abs(wp)) {
        r.symmetry_ok = false;
        r.failures.push_back("symmetry fails at lambda=" + std::to_string(x));
        break;
      }
    } catch (const std::exception&) {
      // out-of-range and similar conditions surface in the positivity pass
      break;
    }
  }
  for (double x : grid) {
    try {
      if (!(d(x) > 0.0)) {
        r.positivity_ok = false;
        r.failures.push_back("positivity fails at lambda=" + std::to_string(x));
        break;
      }
    } catch (const NonPositive& e) {
      r.positivity_ok = false;
      r.failures.push_back(std::string("positivity: ") + e.what());
      break;
    } catch (const std::exception& e) {
      r.failures.push_back(std::string("evaluation: ") + e.what());
      break;
    }
  }
  // Zero of the rational numerator on the probe grid shows up above; also
  // check lambda = 0 explicitly.
  try {
    if (!(d(0.0) > 0.0)) {
      r.positivity_ok = false;
      r.failures.push_back("positivity fails at lambda=0");
    }
  } catch (const std::exception& e) {
    r.positivity_ok = false;
    r.failures.push_back(std::string("positivity at 0: ") + e.what());
  }

  if (spec.family == Family::Power || spec.family == Family::LogPow ||
      spec.family == Family::ExpLog) {
    // Second-order one-sided differences at both splice joints.
    auto deriv = [&](double x, double h) {
      return (-3.0 * d(x) + 4.0 * d(x + h) - d(x + 2.0 * h)) / (2.0 * h);
    };
    auto deriv_left = [&](double x, double h) {
      return (3.0 * d(x) - 4.0 * d(x - h) + d(x - 2.0 * h)) / (2.0 * h);
    };
    const double b = d.splice_radius(), a = b / 2.0;
    const double h = 1e-5 * b;
    double mm = 0.0;
    mm = std::max(mm, std::abs(deriv(a, h) - deriv_left(a, h)));
    mm = std::max(mm, std::abs(deriv(b, h) - deriv_left(b, h)));
    r.max_splice_mismatch = mm;
    if (mm > 1e-6 * std::max(1.0, std::abs(d(b)))) {
      r.splice_c1_ok = false;
      r.failures.push_back("splice C1 mismatch " + std::to_string(mm));
    }
  }
  return r;
}

}  // namespace offwhite
