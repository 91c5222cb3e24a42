#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "portlab/errors.hpp"

namespace portlab::train {

// batches end near the present: the start lags the newest admissible start
// by k periods with P(k) proportional to (1-beta)^k, truncated to the
// history and renormalized. beta = 1 always picks the newest batch.
//
// a batch starting at t covers decisions [t, t+n_b) and needs the price
// move into t+n_b, so the newest admissible start is t_now - n_b.

struct SampleRange {
  int lo;  // oldest admissible start (= t_min)
  int hi;  // newest admissible start (= t_now - n_b)
};

inline SampleRange batch_start_range(int t_min, int t_now, int n_b, double beta) {
  if (n_b < 1) throw validation_error("sampler: batch size must be positive");
  if (!(beta > 0.0 && beta <= 1.0))
    throw validation_error("sampler: decay must be in (0,1], got " + std::to_string(beta));
  int hi = t_now - n_b;
  if (hi < t_min)
    throw range_error("sampler: no room for a batch of " + std::to_string(n_b) + " before t=" +
                      std::to_string(t_now) + " with history starting at " + std::to_string(t_min));
  return {t_min, hi};
}

// exact law of the start index, oldest first (index 0 <-> t = lo)
inline std::vector<double> batch_start_pmf(int t_min, int t_now, int n_b, double beta) {
  auto [lo, hi] = batch_start_range(t_min, t_now, n_b, beta);
  int len = hi - lo + 1;
  std::vector<double> p(size_t(len), 0.0);
  if (beta == 1.0) {
    p.back() = 1.0;
    return p;
  }
  double total = 0.0;
  for (int k = 0; k < len; ++k) total += std::pow(1.0 - beta, k);
  for (int k = 0; k < len; ++k) p[size_t(hi - k - lo)] = std::pow(1.0 - beta, k) / total;
  return p;
}

inline int sample_batch_start(std::mt19937_64& rng, int t_min, int t_now, int n_b, double beta) {
  auto [lo, hi] = batch_start_range(t_min, t_now, n_b, beta);
  if (beta == 1.0 || hi == lo) return hi;
  const int len = hi - lo + 1;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng);
  // invert the truncated geometric cdf: (1-beta)^(k+1) = 1 - u * p_total
  double log_q = std::log1p(-beta);
  double p_total = -std::expm1(double(len) * log_q);
  int k = int(std::floor(std::log1p(-u * p_total) / log_q));
  if (k < 0) k = 0;
  if (k > len - 1) k = len - 1;
  return hi - k;
}

}  // namespace portlab::train
