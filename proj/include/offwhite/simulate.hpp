#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "offwhite/cayley.hpp"
#include "offwhite/paf.hpp"

namespace offwhite {

struct EmbeddingNotPSD : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  int block = 16;      // p: past and future block length
  int paths = 2000;    // sample paths (one 2p-window each)
  uint64_t seed = 42;
  int embed = 0;       // circulant size; 0 selects max(4p, 128) rounded to 2^k
};

/// Circulant embedding of the covariance sequence r_0..r_{L/2}; eigenvalues
/// are clipped at zero and the clipped mass is reported.
struct Embedding {
  int size = 0;
  std::vector<double> eigenvalues;  // after clipping
  double clipped_mass = 0.0;        // |negative part| / total |mass|
};

Embedding circulant_embedding(const std::vector<double>& r, int L);

/// Stationary Gaussian windows of length 2p with autocovariance
/// r_k = c_k / (2 pi). Reproducible from the seed; each path draws from its
/// own derived stream, so the ensemble does not depend on thread count.
/// Refuses embeddings whose clipped mass exceeds 1e-6.
struct Ensemble {
  Eigen::MatrixXd windows;  // paths x 2p
  int block = 0;
  uint64_t seed = 0;
  double clipped_mass = 0.0;
};

Ensemble sample_paths(const CircleDensity& density, const SimConfig& cfg);

/// Sample lag covariances r̂_k (averaged over paths and positions) with the
/// across-path standard error of each lag.
struct LagEstimates {
  std::vector<double> r_hat;
  std::vector<double> se;
};

LagEstimates lag_covariances(const Ensemble& e, int max_lag);

/// Canonical correlations between the past block (first p values) and the
/// future block (last p values), with Toeplitz-averaged covariance blocks
/// (the natural stationary estimator) run through the same whitening + SVD
/// path as the moment-based sections.
std::vector<double> empirical_cca(const Ensemble& e, int p);

/// Monte-Carlo quantile of the largest empirical canonical correlation for
/// white noise with the same block length and path count.
double null_quantile(int p, int paths, double q, uint64_t seed, int reps = 50);

}  // namespace offwhite
