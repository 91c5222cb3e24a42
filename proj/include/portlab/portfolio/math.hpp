#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "portlab/errors.hpp"

namespace portlab::portfolio {

// weight vector over m+1 slots; index 0 is the cash (quote currency) slot
using Weights = std::vector<double>;

inline constexpr double kSimplexTol = 1e-9;

struct CommissionSchedule {
  double sell = 0.0025;  // c_s, charged on sales proceeds
  double buy = 0.0025;   // c_p, charged on purchase spend

  void validate() const {
    if (!(sell >= 0.0 && sell < 1.0) || !(buy >= 0.0 && buy < 1.0))
      throw validation_error("commission rates must lie in [0,1)");
  }
};

inline bool is_simplex(std::span<const double> w, double tol = kSimplexTol) {
  double s = 0.0;
  for (double x : w) {
    if (!(x >= -tol)) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

inline void validate_simplex(std::span<const double> w, const std::string& what, double tol = kSimplexTol) {
  if (w.empty()) throw validation_error(what + ": empty weight vector");
  if (!is_simplex(w, tol)) {
    double s = 0.0;
    for (double x : w) s += x;
    throw validation_error(what + ": weights not on the simplex (sum=" + std::to_string(s) + ")");
  }
}

// all-cash start vector
inline Weights cash_weights(int m) {
  Weights w(size_t(m) + 1, 0.0);
  w[0] = 1.0;
  return w;
}

// price move over one period redistributes the held weights:
//   w'_i = y_i w_i / (y . w)
inline Weights evolved_weights(const Weights& y, const Weights& w_prev) {
  if (y.size() != w_prev.size()) throw validation_error("evolved_weights: length mismatch");
  if (y.empty() || y[0] != 1.0) throw validation_error("evolved_weights: cash relative price must be 1");
  validate_simplex(w_prev, "evolved_weights: w_prev");
  double dot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) throw validation_error("evolved_weights: relative prices must be positive");
    dot += y[i] * w_prev[i];
  }
  Weights out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] * w_prev[i] / dot;
  return out;
}

// right-hand side of the shrinkage fixed point, w' pre-trade (evolved), w post-trade target:
//   f(mu) = [1 - cp w'_0 - (cs + cp - cs cp) sum_{i>=1} (w'_i - mu w_i)^+] / (1 - cp w_0)
inline double remainder_objective(double mu, const Weights& w_evolved, const Weights& w_target,
                                  const CommissionSchedule& c) {
  const double cs = c.sell, cp = c.buy;
  const double cross = cs + cp - cs * cp;
  double sell_sum = 0.0;
  for (size_t i = 1; i < w_evolved.size(); ++i) {
    double d = w_evolved[i] - mu * w_target[i];
    if (d > 0.0) sell_sum += d;
  }
  return (1.0 - cp * w_evolved[0] - cross * sell_sum) / (1.0 - cp * w_target[0]);
}

struct RemainderResult {
  double mu = 1.0;
  int iterations = 0;
  double residual = 0.0;
};

// fixed-point iteration for the transaction remainder factor.
// start at the linear turnover estimate, iterate mu <- f(mu) to 1e-10.
inline RemainderResult transaction_remainder_full(const Weights& w_evolved, const Weights& w_target,
                                                  const CommissionSchedule& c) {
  c.validate();
  if (w_evolved.size() != w_target.size())
    throw validation_error("transaction_remainder: length mismatch");
  validate_simplex(w_evolved, "transaction_remainder: w_evolved");
  validate_simplex(w_target, "transaction_remainder: w_target");

  double turnover = 0.0;
  for (size_t i = 0; i < w_evolved.size(); ++i) turnover += std::abs(w_evolved[i] - w_target[i]);
  double mu = 1.0 - (c.sell + c.buy) * 0.5 * turnover;
  if (mu <= 0.0) mu = 1e-6;
  if (mu > 1.0) mu = 1.0;

  const double tol = 1e-10;
  RemainderResult res;
  for (int it = 0; it < 100; ++it) {
    double next = remainder_objective(mu, w_evolved, w_target, c);
    res.iterations = it + 1;
    res.residual = std::abs(next - mu);
    mu = next;
    if (res.residual < tol) break;
  }
  if (res.residual >= tol)
    throw numerical_error("transaction remainder did not converge, residual=" + std::to_string(res.residual));
  if (!(mu > 0.0 && mu <= 1.0 + 1e-12))
    throw numerical_error("transaction remainder outside (0,1]: " + std::to_string(mu));
  res.mu = std::min(mu, 1.0);
  return res;
}

inline double transaction_remainder(const Weights& w_evolved, const Weights& w_target,
                                    const CommissionSchedule& c) {
  return transaction_remainder_full(w_evolved, w_target, c).mu;
}

// d mu / d w_target via the implicit function theorem at the fixed point.
// S = selling set {i >= 1 : w'_i - mu w_i > 0}:
//   df/dmu  = (C/D) sum_{i in S} w_i            C = cs+cp-cs*cp, D = 1-cp*w_0
//   df/dw_0 = cp * mu / D
//   df/dw_j = C * mu * [j in S] / D
inline Weights remainder_gradient(const Weights& w_evolved, const Weights& w_target,
                                  const CommissionSchedule& c, double mu) {
  const double cs = c.sell, cp = c.buy;
  const double cross = cs + cp - cs * cp;
  const double denom = 1.0 - cp * w_target[0];
  double df_dmu = 0.0;
  std::vector<char> selling(w_target.size(), 0);
  for (size_t i = 1; i < w_target.size(); ++i) {
    if (w_evolved[i] - mu * w_target[i] > 0.0) {
      selling[i] = 1;
      df_dmu += w_target[i];
    }
  }
  df_dmu *= cross / denom;
  const double scale = 1.0 / (1.0 - df_dmu);
  Weights g(w_target.size(), 0.0);
  g[0] = scale * cp * mu / denom;
  for (size_t j = 1; j < w_target.size(); ++j)
    if (selling[j]) g[j] = scale * cross * mu / denom;
  return g;
}

// cheap surrogate used by fast training: mu ~= 1 - c * sum_{i>=1} |w'_i - w_i|
inline double transaction_remainder_approx(const Weights& w_evolved, const Weights& w_target, double c) {
  if (w_evolved.size() != w_target.size())
    throw validation_error("transaction_remainder_approx: length mismatch");
  double s = 0.0;
  for (size_t i = 1; i < w_evolved.size(); ++i) s += std::abs(w_evolved[i] - w_target[i]);
  double mu = 1.0 - c * s;
  return mu > 1e-12 ? mu : 1e-12;
}

inline Weights remainder_gradient_approx(const Weights& w_evolved, const Weights& w_target, double c,
                                         double mu) {
  Weights g(w_target.size(), 0.0);
  if (mu <= 1e-12) return g;  // clamped, locally flat
  for (size_t i = 1; i < w_target.size(); ++i) {
    double d = w_evolved[i] - w_target[i];
    if (d > 0.0)
      g[i] = c;
    else if (d < 0.0)
      g[i] = -c;
  }
  return g;
}

struct PeriodOutcome {
  double mu = 1.0;          // transaction remainder applied at the start of the period
  double rho = 0.0;         // simple return
  double log_return = 0.0;  // ln(1 + rho)
  double value = 1.0;       // portfolio value at the end of the period
};

// one accounting step: weights w are held while prices move by y.
inline PeriodOutcome period_outcome(const Weights& y, const Weights& w, double mu, double p_prev) {
  if (y.size() != w.size()) throw validation_error("period_outcome: length mismatch");
  if (!(mu > 0.0 && mu <= 1.0)) throw validation_error("period_outcome: mu must lie in (0,1]");
  if (!(p_prev > 0.0)) throw validation_error("period_outcome: portfolio value must be positive");
  double dot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) dot += y[i] * w[i];
  double growth = mu * dot;
  if (!(growth > 0.0)) throw numerical_error("period_outcome: nonpositive growth factor");
  PeriodOutcome out;
  out.mu = mu;
  out.rho = growth - 1.0;
  out.log_return = std::log(growth);
  out.value = p_prev * growth;
  return out;
}

// p_f = p_0 * prod_t (1 + rho_t)
inline double final_value(std::span<const PeriodOutcome> outcomes, double p0 = 1.0) {
  double p = p0;
  for (const auto& o : outcomes) p *= 1.0 + o.rho;
  return p;
}

}  // namespace portlab::portfolio
