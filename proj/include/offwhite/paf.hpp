#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "offwhite/cayley.hpp"
#include "offwhite/quadrature.hpp"

namespace offwhite {

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trigonometric moments c_n = ∫ e^{-in theta} dmu(theta) of a finite circle
/// density, Hermitian by construction (c_{-n} = conj c_n).
struct MomentTable {
  int n_max = 0;
  std::vector<std::complex<double>> c;  // index n + n_max
  std::complex<double> at(int n) const { return c[static_cast<size_t>(n + n_max)]; }
  double c0() const { return at(0).real(); }
};

/// Moments by composite Gauss-Legendre with panels capped at the oscillation
/// scale of the largest frequency and refined toward the density's rough
/// angles; the grid is halved once more until every c_n is stable to
/// rel_tol * c_0. Throws NotConverged.
MomentTable moments(const CircleDensity& density, int n_max,
                    double rel_tol = 1e-10);

/// Gram blocks of the past section {z^k : -K <= k <= 0} and the future
/// section {z^k : N+1 <= k <= N+1+K} in L2(mu).
struct GramBlocks {
  int K = 0, N = 0;
  Eigen::MatrixXcd past;    // Toeplitz, entries c_{k-j}
  Eigen::MatrixXcd future;  // same Toeplitz
  Eigen::MatrixXcd cross;   // entries c_{(N+1+l) - (-K+j)}
  bool ill_conditioned = false;
  double condition = 0.0;
};

GramBlocks section_gram(const MomentTable& m, int K, int N);

/// Canonical correlations of the section pair: singular values of
/// Gram(P)^{-1/2} C Gram(F)^{-1/2}, descending; ridge-regularized whitening
/// when a Gram block is numerically singular.
struct SectionReport {
  int K = 0, N = 0;
  std::vector<double> sigmas;
  double sigma1 = 0.0;
  double hs_sum = 0.0;  // sum of sigma_i^2
  bool ill_conditioned = false;
};

SectionReport canonical_correlations(const GramBlocks& blocks);

/// Whitening + SVD on explicit blocks (the same code path, reused by the
/// empirical estimator and by tests feeding synthetic covariance blocks).
SectionReport block_correlations(const Eigen::MatrixXcd& past,
                                 const Eigen::MatrixXcd& future,
                                 const Eigen::MatrixXcd& cross);

struct LogFit {
  double rate = 0.0;       // slope against ln K
  double intercept = 0.0;
  double quality = 0.0;
};

/// Hilbert-Schmidt partial sums across a K-sweep, with the Cauchy gap of the
/// last step and a ln K growth fit (the finite-section shadow of the
/// Hilbert-Schmidt dichotomy).
struct SweepReport {
  std::vector<SectionReport> sections;
  double cauchy_gap = 0.0;  // |HS(K_last) - HS(K_prev)| / HS(K_last)
  LogFit hs_log_fit;
};

SweepReport hs_sweep(const CircleDensity& pole_free, const std::vector<int>& Ks,
                     int N);

struct AngleThresholds {
  double delta_angle = 0.05;   // positive angle when max sigma1 <= 1 - this
  double delta_close = 1e-3;   // raw closing-to-1 threshold at the largest K
  double trend_quality = 0.98; // fit quality for the (1 - sigma1) ~ K^-q trend
  double trend_slope = -0.5;
};

enum class AngleDecision { Pass, Fail, Undecided };

struct AngleEvidence {
  int k = 0;
  AngleDecision decision = AngleDecision::Undecided;
  std::vector<double> sigma1_by_K;
  double sigma1_last = 0.0;
  double trend_slope = 0.0;    // d ln(1 - sigma1) / d ln K
  double trend_quality = 0.0;
  double sigma_extrapolated = 0.0;  // sweep-trend limit of sigma1
};

/// Least k in the window whose pair (P_0, F_{k+1}) shows a positive angle
/// across the K-sweep. Densities with declared poles are reduced first
/// (multiply the poles back in, shift k by the total multiplicity).
struct IndexEstimate {
  std::vector<AngleEvidence> window;
  std::optional<int> index;
  std::vector<std::string> notes;
};

IndexEstimate index_estimate(const CircleDensity& density,
                             const std::vector<int>& Ks, int k_lo, int k_hi,
                             const AngleThresholds& thr = {});

/// Multiply the density by |z - e^{i angle}|^2 (cancels one pole at that
/// angle when present, otherwise records a zero factor).
CircleDensity multiply_by_chord_sq(const CircleDensity& density, double angle);

struct ShiftLawReport {
  IndexEstimate base;
  IndexEstimate shifted;
  bool law_holds = false;  // Ind(|z-z0|^2 mu) == Ind(mu) + 1
  std::string note;
};

ShiftLawReport shift_law_check(const CircleDensity& density, double z0_angle,
                               const std::vector<int>& Ks, int k_lo, int k_hi,
                               const AngleThresholds& thr = {});

/// Canonical correlations of (P_0, F_{N+1}) against the time-reversed pair
/// (F_0, P_{-N-1}); the spectra agree for any real density.
struct TimeReversalReport {
  SectionReport forward;
  SectionReport reversed;
  double max_sigma_gap = 0.0;
};

TimeReversalReport time_reversal_check(const CircleDensity& density, int K, int N);

}  // namespace offwhite
