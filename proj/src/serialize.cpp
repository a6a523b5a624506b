#include "offwhite/serialize.hpp"

#include <cstdio>

namespace offwhite {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ordered_json to_json(const GrowthFit& f) {
  ordered_json j;
  j["model"] = to_string(f.model);
  j["exponent"] = f.exponent;
  j["coefficient"] = f.coefficient;
  j["intercept"] = f.intercept;
  j["quality"] = f.quality;
  return j;
}

ordered_json to_json(const ConvergenceProbe& p) {
  ordered_json j;
  j["verdict"] = to_string(p.verdict);
  if (p.verdict == Finiteness::Finite) {
    j["value"] = p.value;
    j["error_bar"] = p.error_bar;
  }
  j["fit"] = to_json(p.fit);
  j["note"] = p.note;
  j["cutoffs"] = p.cutoffs;
  j["partials"] = p.values;
  return j;
}

ordered_json to_json(const FunctionalResult& r) {
  ordered_json j;
  j["functional"] = to_string(r.id);
  j["kernel"] = r.kernel_note;
  j["probe"] = to_json(r.probe);
  if (r.value) j["value"] = *r.value;
  return j;
}

ordered_json to_json(const ModerationReport& r) {
  ordered_json j;
  j["order"] = r.order;
  j["status"] = to_string(r.status);
  j["not_moderate"] = r.not_moderate;
  ordered_json probes = ordered_json::array();
  for (size_t m = 0; m < r.probes.size(); ++m) {
    ordered_json p = to_json(r.probes[m]);
    p["m"] = static_cast<int>(m);
    probes.push_back(std::move(p));
  }
  j["probes"] = std::move(probes);
  return j;
}

ordered_json to_json(const SectionReport& r, bool with_sigmas) {
  ordered_json j;
  j["K"] = r.K;
  j["N"] = r.N;
  j["sigma1"] = r.sigma1;
  j["hs_sum"] = r.hs_sum;
  j["ill_conditioned"] = r.ill_conditioned;
  if (with_sigmas) j["sigmas"] = r.sigmas;
  return j;
}

ordered_json to_json(const SweepReport& r) {
  ordered_json j;
  ordered_json secs = ordered_json::array();
  for (const auto& s : r.sections) secs.push_back(to_json(s, false));
  j["sections"] = std::move(secs);
  j["cauchy_gap"] = r.cauchy_gap;
  j["hs_log_fit"] = {{"rate", r.hs_log_fit.rate},
                     {"intercept", r.hs_log_fit.intercept},
                     {"quality", r.hs_log_fit.quality}};
  return j;
}

ordered_json to_json(const IndexEstimate& r) {
  ordered_json j;
  if (r.index) j["index"] = *r.index;
  else j["index"] = nullptr;
  ordered_json win = ordered_json::array();
  for (const auto& ev : r.window) {
    ordered_json e;
    e["k"] = ev.k;
    e["decision"] = ev.decision == AngleDecision::Pass
                        ? "positive_angle"
                        : (ev.decision == AngleDecision::Fail ? "closing_to_one"
                                                              : "undecided");
    e["sigma1_by_K"] = ev.sigma1_by_K;
    e["sigma1_last"] = ev.sigma1_last;
    e["sigma1_extrapolated"] = ev.sigma_extrapolated;
    e["trend_slope"] = ev.trend_slope;
    e["trend_quality"] = ev.trend_quality;
    win.push_back(std::move(e));
  }
  j["window"] = std::move(win);
  j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const ShiftLawReport& r) {
  ordered_json j;
  j["base"] = to_json(r.base);
  j["shifted"] = to_json(r.shifted);
  j["law_holds"] = r.law_holds;
  j["note"] = r.note;
  return j;
}

ordered_json to_json(const TimeReversalReport& r) {
  ordered_json j;
  j["forward"] = to_json(r.forward, true);
  j["reversed"] = to_json(r.reversed, true);
  j["max_sigma_gap"] = r.max_sigma_gap;
  return j;
}

ordered_json to_json(const ImplicationReport& r) {
  ordered_json j;
  j["line_sobolev"] = to_json(r.line);
  j["doubling"] = to_json(r.doubling);
  j["derivative"] = to_json(r.derivative);
  j["sobolev_implies_doubling_ok"] = r.sobolev_implies_doubling_ok;
  j["derivative_implies_sobolev_ok"] = r.derivative_implies_sobolev_ok;
  j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const Verdict& v) {
  ordered_json j;
  j["outcome"] = to_string(v.outcome);
  j["moderation_order"] = v.moderation;
  j["declared_zeros"] = v.declared_zeros;
  j["reason"] = v.reason;
  j["validation"] = v.validation.to_json();
  j["moderation"] = to_json(v.moderation_report);
  if (v.decisive) j["decisive"] = to_json(*v.decisive);
  return j;
}

ordered_json to_json(const CrossCheck& c) {
  ordered_json j;
  j["consistent"] = c.consistent;
  j["note"] = c.note;
  j["sweep"] = to_json(c.sweep);
  return j;
}

std::string probe_csv(const ConvergenceProbe& p) {
  std::string out = "cutoff,value\n";
  for (size_t i = 0; i < p.cutoffs.size(); ++i)
    out += fmt(p.cutoffs[i]) + "," + fmt(p.values[i]) + "\n";
  return out;
}

std::string sweep_csv(const SweepReport& r) {
  std::string out = "K,sigma1,hs_sum\n";
  for (const auto& s : r.sections)
    out += std::to_string(s.K) + "," + fmt(s.sigma1) + "," + fmt(s.hs_sum) + "\n";
  return out;
}

std::string sigma_csv(const SectionReport& r) {
  std::string out = "i,sigma\n";
  for (size_t i = 0; i < r.sigmas.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt(r.sigmas[i]) + "\n";
  return out;
}

}  // namespace offwhite
