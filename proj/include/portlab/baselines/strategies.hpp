#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "portlab/baselines/simplex.hpp"
#include "portlab/errors.hpp"
#include "portlab/portfolio/math.hpp"

namespace portlab::baselines {

using portfolio::Weights;

// classical online portfolio selection rules behind one interface. a
// strategy is driven with a growing list of observed price relatives
// (m+1 slots, cash first with relative 1) and answers with the target
// weights for the coming period. history never shrinks; repeating a call
// with the same history repeats the same answer.
class OlpsStrategy {
 public:
  explicit OlpsStrategy(int m) : slots_(m + 1) {
    if (m < 1) throw validation_error("strategy: need at least one non-cash asset");
  }
  virtual ~OlpsStrategy() = default;

  virtual std::string abbrev() const = 0;

  // best stock benchmarks against the whole evaluation window, so the
  // driver hands it the window's relatives before the run
  virtual bool wants_hindsight() const { return false; }
  virtual void prime(const std::vector<Weights>& /*window*/) {}

  Weights decide(const std::vector<Weights>& history, const Weights& w_prev) {
    if (history.size() < seen_)
      throw validation_error(abbrev() + ": history shrank between decisions");
    for (size_t t = seen_; t < history.size(); ++t) validate_relative(history[t]);
    if (int(w_prev.size()) != slots_)
      throw validation_error(abbrev() + ": previous weights have the wrong length");
    if (int(history.size()) < min_history()) {
      portfolio::validate_simplex(w_prev, abbrev() + ": w_prev");
      seen_ = history.size();
      return w_prev;  // warming up: keep the current holdings
    }
    Weights w = update(history);
    seen_ = history.size();
    return w;
  }

 protected:
  virtual int min_history() const { return 0; }
  virtual Weights update(const std::vector<Weights>& history) = 0;

  void validate_relative(const Weights& y) const {
    if (int(y.size()) != slots_)
      throw validation_error(abbrev() + ": price relative has the wrong length");
    if (std::abs(y[0] - 1.0) > 1e-12)
      throw validation_error(abbrev() + ": cash relative must be 1");
    for (double v : y)
      if (!(v > 0.0) || !std::isfinite(v))
        throw validation_error(abbrev() + ": price relatives must be positive");
  }

  Weights uniform_all() const { return Weights(size_t(slots_), 1.0 / double(slots_)); }

  Weights uniform_assets() const {
    Weights w(size_t(slots_), 1.0 / double(slots_ - 1));
    w[0] = 0.0;
    return w;
  }

  int slots_;
  size_t seen_ = 0;
};

namespace detail {

// solve A x = b for symmetric positive definite A (tiny systems)
inline std::vector<double> solve_spd(std::vector<std::vector<double>> a, std::vector<double> b) {
  const size_t n = b.size();
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    for (size_t r = k + 1; r < n; ++r)
      if (std::abs(a[r][k]) > std::abs(a[piv][k])) piv = r;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    if (a[k][k] == 0.0) throw numerical_error("singular system in the Newton-step update");
    for (size_t r = k + 1; r < n; ++r) {
      double f = a[r][k] / a[k][k];
      for (size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (size_t k = n; k-- > 0;) {
    double s = b[k];
    for (size_t c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

// argmin (x-v)' A (x-v) over the simplex, by projected gradient with a
// step bounded by the trace (an upper bound on the top eigenvalue)
inline Weights project_in_norm(const Weights& v, const std::vector<std::vector<double>>& a) {
  const size_t n = v.size();
  double trace = 0.0;
  for (size_t i = 0; i < n; ++i) trace += a[i][i];
  const double step = 1.0 / (2.0 * std::max(trace, 1e-12));
  Weights x = project_to_simplex(v);
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> grad(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) grad[i] += 2.0 * a[i][j] * (x[j] - v[j]);
    Weights next(n);
    for (size_t i = 0; i < n; ++i) next[i] = x[i] - step * grad[i];
    next = project_to_simplex(next);
    double move = 0.0;
    for (size_t i = 0; i < n; ++i) move += std::abs(next[i] - x[i]);
    x = std::move(next);
    if (move < 1e-13) break;
  }
  return x;
}

// deterministic uniform draw in [0,1) from the raw engine output
inline double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// geometric L1 median of a point cloud (Weiszfeld iteration)
inline std::vector<double> l1_median(const std::vector<std::vector<double>>& pts, int max_iter,
                                     double tol) {
  const size_t n = pts[0].size();
  std::vector<double> mu(n, 0.0);
  for (const auto& p : pts)
    for (size_t i = 0; i < n; ++i) mu[i] += p[i] / double(pts.size());
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> num(n, 0.0);
    double den = 0.0;
    for (const auto& p : pts) {
      double d = 0.0;
      for (size_t i = 0; i < n; ++i) d += (p[i] - mu[i]) * (p[i] - mu[i]);
      d = std::sqrt(d);
      if (d < 1e-12) continue;  // sitting on a data point: leave it out
      for (size_t i = 0; i < n; ++i) num[i] += p[i] / d;
      den += 1.0 / d;
    }
    if (den == 0.0) break;  // all points coincide with the iterate
    double move = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double next = num[i] / den;
      move += std::abs(next - mu[i]);
      mu[i] = next;
    }
    if (move < tol) break;
  }
  return mu;
}

// price paths rebuilt from the window of relatives ending at history[t]:
// row k is the price vector k periods back, relative to the latest price
inline std::vector<std::vector<double>> trailing_prices(const std::vector<Weights>& history,
                                                        size_t t, int window) {
  const size_t rows = size_t(window);
  std::vector<std::vector<double>> p(rows);
  p[0].assign(history[t].size(), 1.0);
  for (int k = 1; k < window; ++k) {
    p[size_t(k)] = p[size_t(k) - 1];
    const Weights& y = history[t - size_t(k) + 1];
    for (size_t i = 0; i < y.size(); ++i) p[size_t(k)][i] /= y[i];
  }
  return p;
}

}  // namespace detail

// ---- benchmark rules -------------------------------------------------

// spread over the assets once, then let the allocation ride
class Ubah : public OlpsStrategy {
 public:
  explicit Ubah(int m) : OlpsStrategy(m), w_(uniform_assets()) {}
  std::string abbrev() const override { return "ubah"; }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = seen_; t < history.size(); ++t)
      w_ = portfolio::evolved_weights(history[t], w_);
    return w_;
  }

 private:
  Weights w_;
};

// everything on the asset that does best over the whole window; the one
// deliberately clairvoyant benchmark
class BestStock : public OlpsStrategy {
 public:
  explicit BestStock(int m) : OlpsStrategy(m) {}
  std::string abbrev() const override { return "best"; }
  bool wants_hindsight() const override { return true; }

  void prime(const std::vector<Weights>& window) override {
    for (const auto& y : window) validate_relative(y);
    Weights cum(size_t(slots_), 1.0);
    for (const auto& y : window)
      for (int i = 0; i < slots_; ++i) cum[size_t(i)] *= y[size_t(i)];
    best_ = int(std::max_element(cum.begin(), cum.end()) - cum.begin());  // tie -> lowest index
    primed_ = true;
  }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    int pick = best_;
    if (!primed_) {
      // no window was supplied: fall back to the leader so far
      Weights cum(size_t(slots_), 1.0);
      for (const auto& y : history)
        for (int i = 0; i < slots_; ++i) cum[size_t(i)] *= y[size_t(i)];
      pick = int(std::max_element(cum.begin(), cum.end()) - cum.begin());
    }
    Weights w(size_t(slots_), 0.0);
    w[size_t(pick)] = 1.0;
    return w;
  }

 private:
  bool primed_ = false;
  int best_ = 0;
};

// rebalance to the uniform mix of cash and assets every period
class Ucrp : public OlpsStrategy {
 public:
  explicit Ucrp(int m) : OlpsStrategy(m) {}
  std::string abbrev() const override { return "ucrp"; }

 protected:
  Weights update(const std::vector<Weights>&) override { return uniform_all(); }
};

// constant-rebalanced portfolio with a fixed all-asset target
class M0 : public OlpsStrategy {
 public:
  explicit M0(int m) : OlpsStrategy(m) {}
  std::string abbrev() const override { return "m0"; }

 protected:
  Weights update(const std::vector<Weights>&) override { return uniform_assets(); }
};

// exponentiated gradient: w_i <- w_i exp(eta y_i / (y.w)), renormalized
class Eg : public OlpsStrategy {
 public:
  explicit Eg(int m, double eta = 0.05) : OlpsStrategy(m), eta_(eta), w_(uniform_all()) {}
  std::string abbrev() const override { return "eg"; }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = seen_; t < history.size(); ++t) {
      const Weights& y = history[t];
      double dot = 0.0;
      for (int i = 0; i < slots_; ++i) dot += y[size_t(i)] * w_[size_t(i)];
      double z = 0.0;
      for (int i = 0; i < slots_; ++i) z += (w_[size_t(i)] *= std::exp(eta_ * y[size_t(i)] / dot));
      for (double& v : w_) v /= z;
    }
    return w_;
  }

 private:
  double eta_;
  Weights w_;
};

// universal portfolio over a fixed grid of constant-rebalanced mixes,
// each weighted by the wealth it would have earned
class Up : public OlpsStrategy {
 public:
  explicit Up(int m, int grid = 10000, uint64_t seed = 12345) : OlpsStrategy(m) {
    std::mt19937_64 rng(seed);
    grid_.resize(size_t(grid));
    for (auto& b : grid_) {
      b.resize(size_t(slots_));
      double s = 0.0;
      // normalized exponentials: uniform on the simplex
      for (double& v : b) s += (v = -std::log1p(-detail::unit_uniform(rng)));
      for (double& v : b) v /= s;
    }
    wealth_.assign(size_t(grid), 1.0);
  }
  std::string abbrev() const override { return "up"; }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = seen_; t < history.size(); ++t) {
      const Weights& y = history[t];
      for (size_t k = 0; k < grid_.size(); ++k) {
        double dot = 0.0;
        for (int i = 0; i < slots_; ++i) dot += y[size_t(i)] * grid_[k][size_t(i)];
        wealth_[k] *= dot;
      }
    }
    Weights w(size_t(slots_), 0.0);
    double total = 0.0;
    for (size_t k = 0; k < grid_.size(); ++k) {
      total += wealth_[k];
      for (int i = 0; i < slots_; ++i) w[size_t(i)] += wealth_[k] * grid_[k][size_t(i)];
    }
    for (double& v : w) v /= total;
    return w;
  }

 private:
  std::vector<Weights> grid_;
  std::vector<double> wealth_;
};

// online Newton step on the log-wealth objective with an A-norm
// projection back to the simplex
class Ons : public OlpsStrategy {
 public:
  explicit Ons(int m, double eta = 0.0, double beta = 1.0, double delta = 0.125)
      : OlpsStrategy(m), eta_(eta), beta_(beta), delta_(delta), w_(uniform_all()) {
    a_.assign(size_t(slots_), std::vector<double>(size_t(slots_), 0.0));
    for (int i = 0; i < slots_; ++i) a_[size_t(i)][size_t(i)] = 1.0;
    b_.assign(size_t(slots_), 0.0);
  }
  std::string abbrev() const override { return "ons"; }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = seen_; t < history.size(); ++t) {
      const Weights& y = history[t];
      double dot = 0.0;
      for (int i = 0; i < slots_; ++i) dot += y[size_t(i)] * w_[size_t(i)];
      std::vector<double> grad(size_t(slots_), 0.0);
      for (int i = 0; i < slots_; ++i) grad[size_t(i)] = y[size_t(i)] / dot;
      for (int i = 0; i < slots_; ++i)
        for (int j = 0; j < slots_; ++j) a_[size_t(i)][size_t(j)] += grad[size_t(i)] * grad[size_t(j)];
      for (int i = 0; i < slots_; ++i) b_[size_t(i)] += (1.0 + 1.0 / beta_) * grad[size_t(i)];
      std::vector<double> target = detail::solve_spd(a_, b_);
      for (double& v : target) v *= delta_;
      Weights proj = detail::project_in_norm(Weights(target.begin(), target.end()), a_);
      for (int i = 0; i < slots_; ++i)
        w_[size_t(i)] = (1.0 - eta_) * proj[size_t(i)] + eta_ / double(slots_);
    }
    return w_;
  }

 private:
  double eta_, beta_, delta_;
  Weights w_;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
};

// wealth shifts from recent winners to assets their returns correlated
// with across two adjacent lag windows
class Anticor : public OlpsStrategy {
 public:
  explicit Anticor(int m, int window = 5) : OlpsStrategy(m), w_(uniform_all()), win_(window) {
    if (window < 2) throw validation_error("anticor: window must be at least 2");
  }
  std::string abbrev() const override { return "anticor"; }

 protected:
  int min_history() const override { return 2 * win_; }

  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = std::max(seen_, size_t(2 * win_ - 1)); t < history.size(); ++t) step(history, t);
    return w_;
  }

 private:
  void step(const std::vector<Weights>& history, size_t t) {
    const int n = slots_, w = win_;
    auto logs = [&](size_t row, int col, int block) {
      // block 0 is the older lag window, block 1 the newer
      size_t idx = t - size_t(2 * w) + 1 + size_t(block * w) + row;
      return std::log(history[idx][size_t(col)]);
    };
    std::vector<double> mu1(size_t(n), 0.0), mu2(size_t(n), 0.0), sd1(size_t(n), 0.0), sd2(size_t(n), 0.0);
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < w; ++r) {
        mu1[size_t(j)] += logs(size_t(r), j, 0) / w;
        mu2[size_t(j)] += logs(size_t(r), j, 1) / w;
      }
      for (int r = 0; r < w; ++r) {
        double d1 = logs(size_t(r), j, 0) - mu1[size_t(j)];
        double d2 = logs(size_t(r), j, 1) - mu2[size_t(j)];
        sd1[size_t(j)] += d1 * d1 / (w - 1);
        sd2[size_t(j)] += d2 * d2 / (w - 1);
      }
      sd1[size_t(j)] = std::sqrt(sd1[size_t(j)]);
      sd2[size_t(j)] = std::sqrt(sd2[size_t(j)]);
    }
    auto cor = [&](int i, int j) {
      if (sd1[size_t(i)] <= 0.0 || sd2[size_t(j)] <= 0.0) return 0.0;
      double c = 0.0;
      for (int r = 0; r < w; ++r)
        c += (logs(size_t(r), i, 0) - mu1[size_t(i)]) * (logs(size_t(r), j, 1) - mu2[size_t(j)]) / (w - 1);
      return c / (sd1[size_t(i)] * sd2[size_t(j)]);
    };
    std::vector<std::vector<double>> claim(size_t(n), std::vector<double>(size_t(n), 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || !(mu2[size_t(i)] > mu2[size_t(j)])) continue;
        double cij = cor(i, j);
        if (cij <= 0.0) continue;
        claim[size_t(i)][size_t(j)] = cij + std::max(-cor(i, i), 0.0) + std::max(-cor(j, j), 0.0);
      }
    Weights next = w_;
    for (int i = 0; i < n; ++i) {
      double total = std::accumulate(claim[size_t(i)].begin(), claim[size_t(i)].end(), 0.0);
      if (total <= 0.0) continue;
      for (int j = 0; j < n; ++j) {
        double move = w_[size_t(i)] * claim[size_t(i)][size_t(j)] / total;
        next[size_t(i)] -= move;
        next[size_t(j)] += move;
      }
    }
    w_ = std::move(next);
  }

  Weights w_;
  int win_;
};

// the passive-aggressive step shared by the reversion strategies:
// move toward predicted relatives x_hat until the margin is met
inline Weights reversion_step(const Weights& w, const Weights& x_hat, double eps) {
  const size_t n = w.size();
  double mean = std::accumulate(x_hat.begin(), x_hat.end(), 0.0) / double(n);
  double dot = 0.0, norm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    dot += w[i] * x_hat[i];
    norm2 += (x_hat[i] - mean) * (x_hat[i] - mean);
  }
  if (norm2 <= 0.0) return w;  // flat prediction: nothing to exploit
  double tau = std::max(0.0, (eps - dot) / norm2);
  Weights v(n);
  for (size_t i = 0; i < n; ++i) v[i] = w[i] + tau * (x_hat[i] - mean);
  return project_to_simplex(v);
}

// moving-average reversion: predict the next relative from the window
// mean of past prices, then take the passive-aggressive step
class Olmar : public OlpsStrategy {
 public:
  explicit Olmar(int m, int window = 5, double eps = 10.0)
      : OlpsStrategy(m), w_(uniform_all()), win_(window), eps_(eps) {
    if (window < 2) throw validation_error("olmar: window must be at least 2");
  }
  std::string abbrev() const override { return "olmar"; }

 protected:
  int min_history() const override { return win_ - 1; }

  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = std::max(seen_, size_t(win_ - 2)); t < history.size(); ++t) {
      auto prices = detail::trailing_prices(history, t, win_);
      Weights x_hat(size_t(slots_), 0.0);
      for (const auto& p : prices)
        for (int i = 0; i < slots_; ++i) x_hat[size_t(i)] += p[size_t(i)] / double(win_);
      w_ = reversion_step(w_, x_hat, eps_);
    }
    return w_;
  }

 private:
  Weights w_;
  int win_;
  double eps_;
};

// mean reversion on the latest relative alone
class Pamr : public OlpsStrategy {
 public:
  explicit Pamr(int m, double eps = 0.5) : OlpsStrategy(m), w_(uniform_all()), eps_(eps) {}
  std::string abbrev() const override { return "pamr"; }

 protected:
  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = seen_; t < history.size(); ++t) {
      const Weights& y = history[t];
      double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(slots_);
      double dot = 0.0, norm2 = 0.0;
      for (int i = 0; i < slots_; ++i) {
        dot += w_[size_t(i)] * y[size_t(i)];
        norm2 += (y[size_t(i)] - mean) * (y[size_t(i)] - mean);
      }
      if (norm2 <= 0.0) continue;  // all relatives equal: no signal
      double tau = std::max(0.0, dot - eps_) / norm2;
      Weights v(size_t(slots_), 0.0);
      for (int i = 0; i < slots_; ++i) v[size_t(i)] = w_[size_t(i)] - tau * (y[size_t(i)] - mean);
      w_ = project_to_simplex(v);
    }
    return w_;
  }

 private:
  Weights w_;
  double eps_;
};

// PAMR driven by the window mean of past relatives instead of the last one
class Wmamr : public OlpsStrategy {
 public:
  explicit Wmamr(int m, int window = 5, double eps = 0.5)
      : OlpsStrategy(m), w_(uniform_all()), win_(window), eps_(eps) {
    if (window < 1) throw validation_error("wmamr: window must be positive");
  }
  std::string abbrev() const override { return "wmamr"; }

 protected:
  int min_history() const override { return win_; }

  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = std::max(seen_, size_t(win_ - 1)); t < history.size(); ++t) {
      Weights avg(size_t(slots_), 0.0);
      for (int k = 0; k < win_; ++k)
        for (int i = 0; i < slots_; ++i) avg[size_t(i)] += history[t - size_t(k)][size_t(i)] / double(win_);
      double mean = std::accumulate(avg.begin(), avg.end(), 0.0) / double(slots_);
      double dot = 0.0, norm2 = 0.0;
      for (int i = 0; i < slots_; ++i) {
        dot += w_[size_t(i)] * avg[size_t(i)];
        norm2 += (avg[size_t(i)] - mean) * (avg[size_t(i)] - mean);
      }
      if (norm2 <= 0.0) continue;
      double tau = std::max(0.0, dot - eps_) / norm2;
      Weights v(size_t(slots_), 0.0);
      for (int i = 0; i < slots_; ++i) v[size_t(i)] = w_[size_t(i)] - tau * (avg[size_t(i)] - mean);
      w_ = project_to_simplex(v);
    }
    return w_;
  }

 private:
  Weights w_;
  int win_;
  double eps_;
};

// reversion toward the geometric L1 median of the trailing price window,
// which shrugs off single-period outliers that skew the mean
class Rmr : public OlpsStrategy {
 public:
  explicit Rmr(int m, int window = 5, double eps = 10.0, int max_iter = 200, double tol = 1e-9)
      : OlpsStrategy(m), w_(uniform_all()), win_(window), eps_(eps), max_iter_(max_iter), tol_(tol) {
    if (window < 2) throw validation_error("rmr: window must be at least 2");
  }
  std::string abbrev() const override { return "rmr"; }

 protected:
  int min_history() const override { return win_ - 1; }

  Weights update(const std::vector<Weights>& history) override {
    for (size_t t = std::max(seen_, size_t(win_ - 2)); t < history.size(); ++t) {
      auto prices = detail::trailing_prices(history, t, win_);
      auto med = detail::l1_median(prices, max_iter_, tol_);
      w_ = reversion_step(w_, Weights(med.begin(), med.end()), eps_);
    }
    return w_;
  }

 private:
  Weights w_;
  int win_;
  double eps_;
  int max_iter_;
  double tol_;
};

// ---- registry ---------------------------------------------------------

inline const std::vector<std::string>& baseline_abbreviations() {
  static const std::vector<std::string> names = {"ubah", "best",    "ucrp",  "m0",   "eg",    "up",
                                                 "ons",  "anticor", "olmar", "pamr", "wmamr", "rmr"};
  return names;
}

// named in the comparison tables but deliberately not implemented
inline const std::vector<std::string>& unimplemented_baselines() {
  static const std::vector<std::string> names = {"cwmr", "bk", "bnn", "cornk"};
  return names;
}

inline std::unique_ptr<OlpsStrategy> make_baseline(const std::string& abbrev, int m) {
  if (abbrev == "ubah") return std::make_unique<Ubah>(m);
  if (abbrev == "best") return std::make_unique<BestStock>(m);
  if (abbrev == "ucrp") return std::make_unique<Ucrp>(m);
  if (abbrev == "m0") return std::make_unique<M0>(m);
  if (abbrev == "eg") return std::make_unique<Eg>(m);
  if (abbrev == "up") return std::make_unique<Up>(m);
  if (abbrev == "ons") return std::make_unique<Ons>(m);
  if (abbrev == "anticor") return std::make_unique<Anticor>(m);
  if (abbrev == "olmar") return std::make_unique<Olmar>(m);
  if (abbrev == "pamr") return std::make_unique<Pamr>(m);
  if (abbrev == "wmamr") return std::make_unique<Wmamr>(m);
  if (abbrev == "rmr") return std::make_unique<Rmr>(m);
  for (const auto& n : unimplemented_baselines())
    if (abbrev == n) throw config_error("strategy '" + abbrev + "' is not implemented");
  std::string known;
  for (const auto& n : baseline_abbreviations()) known += (known.empty() ? "" : ", ") + n;
  throw config_error("unknown strategy '" + abbrev + "'; known: " + known);
}

// drive one decision and enforce the simplex contract on the answer
inline Weights decide_baseline(OlpsStrategy& s, const std::vector<Weights>& history,
                               const Weights& w_prev) {
  Weights w = s.decide(history, w_prev);
  portfolio::validate_simplex(w, s.abbrev() + ": decision");
  return w;
}

}  // namespace portlab::baselines
