#pragma once

#include <optional>
#include <string>
#include <vector>

#include "offwhite/cayley.hpp"
#include "offwhite/density.hpp"
#include "offwhite/paf.hpp"
#include "offwhite/sobolev.hpp"

namespace offwhite {

struct ZeroDeclarationInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Outcome { OffWhite, NotOffWhite, Inconclusive, Unsupported };

const char* to_string(Outcome o);

struct ClassifyParams {
  SobolevParams sobolev;
  LadderParams moderation;  // generic probe defaults
  int m_max = 6;
};

/// Full classification result with the evidence that produced it.
struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  int moderation = -1;
  std::vector<double> declared_zeros;
  std::string reason;
  ValidationReport validation;
  ModerationReport moderation_report;
  std::optional<FunctionalResult> decisive;  // the Sobolev test that decided
};

/// Decision pipeline: moderation order m, then
///   m = 0  -> NotOffWhite (a finite spectral measure has no pole at 1);
///   m = 1  -> line Sobolev functional of ln W decides;
///   m >= 2 -> requires m-1 declared zero angles (conjugation-closed, not at
///             angle 0); the circle seminorm of the log-remainder after
///             removing the declared zero/pole factors decides; without
///             declarations the case is Unsupported.
Verdict classify(const Density& d, const std::vector<double>& declared_zeros = {},
                 const ClassifyParams& params = {});

/// ln of the smooth remainder of the pushforward after removing the pole
/// factor |1-z|^{2m} and the declared zero factors (exposed for the m >= 2
/// path and for cross-checks).
CirclePhi log_remainder_phi(const Density& d, int m,
                            const std::vector<double>& zero_angles);

/// Independent finite-section check of a decided verdict (m = 1): the HS
/// sweep of the pole-removed pushforward at the shifted pair (P_0, F_1) must
/// Cauchy-converge for OffWhite and grow like ln K for a Divergent
/// NotOffWhite.
struct CrossCheck {
  SweepReport sweep;
  bool consistent = false;
  std::string note;
};

CrossCheck verdict_cross_check(const Density& d, const Verdict& v,
                               const std::vector<int>& Ks = {32, 64, 128, 256});

/// Same check driven by an explicit finite circle density (the smooth part w
/// with the pole already removed) and a decisive circle verdict.
CrossCheck circle_cross_check(const CircleDensity& pole_free, Verdict verdict,
                              const std::vector<int>& Ks = {32, 64, 128, 256});

}  // namespace offwhite
