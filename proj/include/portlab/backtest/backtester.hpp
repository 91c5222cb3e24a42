#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "portlab/backtest/records.hpp"
#include "portlab/baselines/strategies.hpp"
#include "portlab/errors.hpp"
#include "portlab/market/price_matrix.hpp"
#include "portlab/policy/network.hpp"
#include "portlab/portfolio/math.hpp"
#include "portlab/train/trainer.hpp"

namespace portlab::backtest {

// anything the backtest driver can steer through a held-out range. the
// view handed to decide is cut off at the decision period, so a strategy
// cannot read the future even by accident.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual portfolio::Weights decide(const market::MarketView& view, int t,
                                    const portfolio::Weights& w_prev) = 0;
  // called once the move into t_known is observable; online learners hook here
  virtual void after_step(const market::MarketView& /*view*/, int /*t_known*/) {}
  // hindsight benchmarks receive the evaluation window's relatives up front
  virtual void prime_range(const market::GlobalPriceMatrix& /*mat*/, int /*t_start*/, int /*t_end*/) {}
};

// classical rule driven over the backtest window only: its history starts
// empty at the window's first decision, matching the round-by-round
// protocol those algorithms are defined under
class BaselineStrategy : public Strategy {
 public:
  explicit BaselineStrategy(std::unique_ptr<baselines::OlpsStrategy> s) : s_(std::move(s)) {
    if (!s_) throw validation_error("backtest: null strategy");
  }

  std::string name() const override { return s_->abbrev(); }

  portfolio::Weights decide(const market::MarketView& view, int t,
                            const portfolio::Weights& w_prev) override {
    if (first_t_ < 0) first_t_ = t;
    for (int s = first_t_ + int(history_.size()) + 1; s <= t; ++s)
      history_.push_back(view.relative(s));
    return baselines::decide_baseline(*s_, history_, w_prev);
  }

  void prime_range(const market::GlobalPriceMatrix& mat, int t_start, int t_end) override {
    if (!s_->wants_hindsight()) return;
    std::vector<portfolio::Weights> window;
    for (int t = t_start + 1; t <= t_end - 1; ++t) window.push_back(market::relative_price(mat, t));
    s_->prime(window);
  }

 private:
  std::unique_ptr<baselines::OlpsStrategy> s_;
  std::vector<portfolio::Weights> history_;
  int first_t_ = -1;
};

// trained policy network wired to its trainer: decisions go into the
// portfolio memory as they happen, so rolling updates during the backtest
// sample batches that include backtest-era rows
class AgentStrategy : public Strategy {
 public:
  explicit AgentStrategy(train::Trainer& trainer, policy::PolicyNetwork& net)
      : trainer_(&trainer), net_(&net), ev_(net.graph) {}

  std::string name() const override { return "nntrader"; }

  portfolio::Weights decide(const market::MarketView& view, int t,
                            const portfolio::Weights& w_prev) override {
    if (t < net_->n - 1)
      throw range_error("agent: period " + std::to_string(t) + " has no full input window (n=" +
                        std::to_string(net_->n) + ")");
    portfolio::Weights w = policy::decide_with(*net_, ev_, view.price_tensor(t, net_->n), w_prev);
    trainer_->pvm().write(t, w);
    return w;
  }

  void after_step(const market::MarketView& /*view*/, int t_known) override {
    trainer_->rolling_train(t_known);
  }

 private:
  train::Trainer* trainer_;
  policy::PolicyNetwork* net_;
  ad::Eval ev_;
};

struct BacktestConfig {
  int t_start = 0;
  int t_end = 0;  // exclusive; the last decision happens at t_end - 2
  portfolio::CommissionSchedule commissions{};
  bool online = false;  // fire after_step hooks (rolling training)
};

// drive the strategy through [t_start, t_end): start all in cash, ask for
// a decision each period, settle it with the exact transaction remainder,
// realize the return against the next period's relatives
inline std::vector<BacktestRecord> run_backtest(Strategy& strategy,
                                                const market::GlobalPriceMatrix& mat,
                                                const BacktestConfig& cfg) {
  cfg.commissions.validate();
  if (cfg.t_start < 0 || cfg.t_end > mat.T() || cfg.t_start > cfg.t_end - 2)
    throw range_error("backtest: span [" + std::to_string(cfg.t_start) + "," +
                      std::to_string(cfg.t_end) + ") leaves no decidable period");
  strategy.prime_range(mat, cfg.t_start, cfg.t_end);

  std::vector<BacktestRecord> records;
  portfolio::Weights w_prev(size_t(mat.m()) + 1, 0.0);
  w_prev[0] = 1.0;  // the initial portfolio is all cash
  double p = 1.0;
  for (int t = cfg.t_start; t <= cfg.t_end - 2; ++t) {
    BacktestRecord rec;
    market::MarketView view(mat, t);
    try {
      rec.w_target = strategy.decide(view, t, w_prev);
    } catch (const std::runtime_error& e) {
      throw validation_error("backtest: " + strategy.name() + " failed at period " +
                             std::to_string(t) + ": " + e.what());
    }
    portfolio::validate_simplex(rec.w_target, strategy.name() + ": decision at " + std::to_string(t));

    rec.w_evolved =
        t == 0 ? w_prev : portfolio::evolved_weights(market::relative_price(mat, t), w_prev);
    rec.mu = portfolio::transaction_remainder(rec.w_evolved, rec.w_target, cfg.commissions);
    portfolio::Weights y_next = market::relative_price(mat, t + 1);
    double gross = 0.0;
    for (size_t i = 0; i < rec.w_target.size(); ++i) gross += y_next[i] * rec.w_target[i];
    rec.rho = rec.mu * gross - 1.0;
    rec.r = std::log(rec.mu * gross);
    p *= rec.mu * gross;
    rec.p = p;
    rec.timestamp = mat.periods[size_t(t) + 1];

    w_prev = rec.w_target;
    records.push_back(std::move(rec));
    if (cfg.online) strategy.after_step(market::MarketView(mat, t + 1), t + 1);
  }
  return records;
}

// re-settle an already-decided target sequence under a different
// commission schedule; used to isolate trading costs from decisions
inline std::vector<BacktestRecord> replay_decisions(const std::vector<portfolio::Weights>& targets,
                                                    const market::GlobalPriceMatrix& mat, int t_start,
                                                    const portfolio::CommissionSchedule& commissions) {
  commissions.validate();
  if (t_start < 0 || t_start + int(targets.size()) > mat.T() - 1)
    throw range_error("replay: targets overrun the price history");
  std::vector<BacktestRecord> records;
  portfolio::Weights w_prev(size_t(mat.m()) + 1, 0.0);
  w_prev[0] = 1.0;
  double p = 1.0;
  for (size_t j = 0; j < targets.size(); ++j) {
    const int t = t_start + int(j);
    BacktestRecord rec;
    rec.w_target = targets[j];
    portfolio::validate_simplex(rec.w_target, "replay: target at " + std::to_string(t));
    rec.w_evolved =
        t == 0 ? w_prev : portfolio::evolved_weights(market::relative_price(mat, t), w_prev);
    rec.mu = portfolio::transaction_remainder(rec.w_evolved, rec.w_target, commissions);
    portfolio::Weights y_next = market::relative_price(mat, t + 1);
    double gross = 0.0;
    for (size_t i = 0; i < rec.w_target.size(); ++i) gross += y_next[i] * rec.w_target[i];
    rec.rho = rec.mu * gross - 1.0;
    rec.r = std::log(rec.mu * gross);
    p *= rec.mu * gross;
    rec.p = p;
    rec.timestamp = mat.periods[size_t(t) + 1];
    w_prev = rec.w_target;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace portlab::backtest
