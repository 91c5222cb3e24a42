#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/portfolio/math.hpp"

namespace portlab::baselines {

// Euclidean projection onto {w >= 0, sum w = 1} by the sorted-threshold
// rule: w_i = max(v_i - theta, 0) with theta chosen so the survivors sum
// to one. idempotent on points already inside.
inline portfolio::Weights project_to_simplex(const portfolio::Weights& v) {
  if (v.empty()) throw validation_error("project_to_simplex: empty vector");
  for (double x : v)
    if (!std::isfinite(x)) throw validation_error("project_to_simplex: non-finite entry");

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    double cand = (cum - 1.0) / double(j + 1);
    if (u[j] - cand > 0.0) theta = cand;
  }
  portfolio::Weights w(v.size());
  double total = 0.0;
  for (size_t i = 0; i < v.size(); ++i) total += (w[i] = std::max(v[i] - theta, 0.0));
  for (double& x : w) x /= total;  // absorb rounding so the sum is exact
  return w;
}

}  // namespace portlab::baselines
