#include "offwhite/simulate.hpp"

#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/FFT>

#include "offwhite/parallel.hpp"

namespace offwhite {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Box-Muller over explicit uniform bits; identical streams on any platform.
class NormalStream {
 public:
  explicit NormalStream(uint64_t seed) : eng_(seed) {}
  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = to_unit(eng_());
    } while (u1 <= 0.0);
    const double u2 = to_unit(eng_());
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  static double to_unit(uint64_t x) { return (x >> 11) * 0x1.0p-53; }
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_ = false;
};

int embed_size(const SimConfig& cfg) {
  if (cfg.embed > 0) return cfg.embed;
  int L = 1;
  while (L < std::max(4 * cfg.block, 128)) L <<= 1;
  return L;
}

}  // namespace

Embedding circulant_embedding(const std::vector<double>& r, int L) {
  if (static_cast<int>(r.size()) < L / 2 + 1)
    throw std::invalid_argument("need covariances up to lag L/2");
  std::vector<double> first(L);
  for (int k = 0; k <= L / 2; ++k) first[static_cast<size_t>(k)] = r[static_cast<size_t>(k)];
  for (int k = L / 2 + 1; k < L; ++k) first[static_cast<size_t>(k)] = r[static_cast<size_t>(L - k)];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, first);
  Embedding e;
  e.size = L;
  e.eigenvalues.resize(static_cast<size_t>(L));
  double neg = 0.0, total = 0.0;
  for (int k = 0; k < L; ++k) {
    double v = spec[static_cast<size_t>(k)].real();
    total += std::abs(v);
    if (v < 0.0) {
      neg += -v;
      v = 0.0;
    }
    e.eigenvalues[static_cast<size_t>(k)] = v;
  }
  e.clipped_mass = total > 0.0 ? neg / total : 0.0;
  return e;
}

Ensemble sample_paths(const CircleDensity& density, const SimConfig& cfg) {
  if (!density.poles().empty())
    throw EmbeddingNotPSD("sampling needs a finite (pole-free) density");
  if (!density.conjugation_symmetric())
    throw SpecError("sampling needs a conjugation-symmetric density");
  const int L = embed_size(cfg);
  if (L < 4 * cfg.block) throw std::invalid_argument("embedding size < 4p");
  MomentTable m = moments(density, L / 2 + 1);
  std::vector<double> r(static_cast<size_t>(L / 2 + 1));
  for (int k = 0; k <= L / 2; ++k)
    r[static_cast<size_t>(k)] = m.at(k).real() / (2.0 * M_PI);
  Embedding emb = circulant_embedding(r, L);
  if (emb.clipped_mass > 1e-6)
    throw EmbeddingNotPSD("clipped spectral mass " + std::to_string(emb.clipped_mass));

  // With xi_k = sqrt(L lambda_k) eps_k and fft.inv scaling by 1/L, the output
  // is (1/sqrt(L)) sum e^{2 pi i jk/L} sqrt(lambda_k) eps_k, whose real and
  // imaginary parts are independent with covariance circ(r).
  std::vector<double> amp(static_cast<size_t>(L));
  for (int k = 0; k < L; ++k)
    amp[static_cast<size_t>(k)] =
        std::sqrt(emb.eigenvalues[static_cast<size_t>(k)] * static_cast<double>(L));

  Ensemble out;
  out.block = cfg.block;
  out.seed = cfg.seed;
  out.clipped_mass = emb.clipped_mass;
  out.windows.resize(cfg.paths, 2 * cfg.block);
  const int pairs = (cfg.paths + 1) / 2;
  parallel_for(pairs, [&](int pair) {
    NormalStream gen(splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (pair + 1))));
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> xi(static_cast<size_t>(L));
    for (int k = 0; k < L; ++k)
      xi[static_cast<size_t>(k)] =
          amp[static_cast<size_t>(k)] * std::complex<double>(gen.next(), gen.next());
    std::vector<std::complex<double>> y;
    fft.inv(y, xi);
    const int row0 = 2 * pair;
    for (int j = 0; j < 2 * cfg.block; ++j) {
      const std::complex<double> v = y[static_cast<size_t>(j)];
      out.windows(row0, j) = v.real();
      if (row0 + 1 < cfg.paths) out.windows(row0 + 1, j) = v.imag();
    }
  });
  return out;
}

LagEstimates lag_covariances(const Ensemble& e, int max_lag) {
  const int n = static_cast<int>(e.windows.rows());
  const int m = static_cast<int>(e.windows.cols());
  if (max_lag >= m) throw std::invalid_argument("lag exceeds window length");
  LagEstimates out;
  out.r_hat.resize(static_cast<size_t>(max_lag + 1));
  out.se.resize(static_cast<size_t>(max_lag + 1));
  for (int k = 0; k <= max_lag; ++k) {
    double mean = 0.0, mean2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j + k < m; ++j) acc += e.windows(i, j) * e.windows(i, j + k);
      acc /= (m - k);
      mean += acc;
      mean2 += acc * acc;
    }
    mean /= n;
    mean2 /= n;
    out.r_hat[static_cast<size_t>(k)] = mean;
    out.se[static_cast<size_t>(k)] =
        std::sqrt(std::max(0.0, mean2 - mean * mean) / n);
  }
  return out;
}

std::vector<double> empirical_cca(const Ensemble& e, int p) {
  const int n = static_cast<int>(e.windows.rows());
  const int m = static_cast<int>(e.windows.cols());
  if (m != 2 * p) throw std::invalid_argument("windows must have length 2p");
  if (n < 20 * p) throw RankDeficient("need at least 20 p paths");
  LagEstimates lags = lag_covariances(e, 2 * p - 1);
  Eigen::MatrixXcd past(p, p), future(p, p), cross(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      past(i, j) = lags.r_hat[static_cast<size_t>(std::abs(i - j))];
      future(i, j) = lags.r_hat[static_cast<size_t>(std::abs(i - j))];
      cross(i, j) = lags.r_hat[static_cast<size_t>(p + j - i)];
    }
  SectionReport rep = block_correlations(past, future, cross);
  return rep.sigmas;
}

double null_quantile(int p, int paths, double q, uint64_t seed, int reps) {
  std::vector<double> tops(static_cast<size_t>(reps));
  parallel_for(reps, [&](int rep) {
    NormalStream gen(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (rep + 1))));
    Ensemble e;
    e.block = p;
    e.windows.resize(paths, 2 * p);
    for (int i = 0; i < paths; ++i)
      for (int j = 0; j < 2 * p; ++j) e.windows(i, j) = gen.next();
    tops[static_cast<size_t>(rep)] = empirical_cca(e, p).front();
  });
  std::sort(tops.begin(), tops.end());
  const int idx = std::min(reps - 1, static_cast<int>(q * reps));
  return tops[static_cast<size_t>(idx)];
}

}  // namespace offwhite
