#pragma once

#include "offwhite/classify.hpp"
#include "offwhite/paf.hpp"
#include "offwhite/report_json.hpp"
#include "offwhite/simulate.hpp"
#include "offwhite/sobolev.hpp"

namespace offwhite {

ordered_json to_json(const GrowthFit& f);
ordered_json to_json(const ConvergenceProbe& p);
ordered_json to_json(const FunctionalResult& r);
ordered_json to_json(const ModerationReport& r);
ordered_json to_json(const SectionReport& r, bool with_sigmas = true);
ordered_json to_json(const SweepReport& r);
ordered_json to_json(const IndexEstimate& r);
ordered_json to_json(const ShiftLawReport& r);
ordered_json to_json(const TimeReversalReport& r);
ordered_json to_json(const ImplicationReport& r);
ordered_json to_json(const Verdict& v);
ordered_json to_json(const CrossCheck& c);

/// Ladder curve as "cutoff,value" CSV rows.
std::string probe_csv(const ConvergenceProbe& p);
/// K-sweep as "K,sigma1,hs_sum" CSV rows.
std::string sweep_csv(const SweepReport& r);
/// Sigma spectrum as "i,sigma" CSV rows.
std::string sigma_csv(const SectionReport& r);

}  // namespace offwhite
