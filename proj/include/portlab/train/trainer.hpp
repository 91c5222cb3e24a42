#pragma once

#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "portlab/ad/adam.hpp"
#include "portlab/ad/graph.hpp"
#include "portlab/errors.hpp"
#include "portlab/market/price_matrix.hpp"
#include "portlab/policy/network.hpp"
#include "portlab/portfolio/math.hpp"
#include "portlab/train/pvm.hpp"
#include "portlab/train/sampler.hpp"

namespace portlab::train {

struct TrainingConfig {
  int steps = 80000;
  double learning_rate = 2.8e-4;
  int batch_size = 109;
  double buffer_decay = 5e-5;  // geometric bias toward recent batches
  bool fast_train = true;      // surrogate remainder inside the loss
  portfolio::CommissionSchedule commissions{};
  uint64_t seed = 0;
  int log_every = 1000;  // 0 silences progress logging
  int rolling_steps = 85;
  double rolling_learning_rate = 2.8e-4;
  double rolling_buffer_decay = 5e-5;

  void validate() const {
    if (steps < 0) throw config_error("training: steps must be nonnegative");
    if (batch_size < 1) throw config_error("training: batch size must be positive");
    if (!(learning_rate > 0.0) || !(rolling_learning_rate > 0.0))
      throw config_error("training: learning rates must be positive");
    if (!(buffer_decay > 0.0 && buffer_decay <= 1.0) ||
        !(rolling_buffer_decay > 0.0 && rolling_buffer_decay <= 1.0))
      throw config_error("training: buffer decay must be in (0,1]");
    if (rolling_steps < 0) throw config_error("training: rolling steps must be nonnegative");
    commissions.validate();
  }
};

struct BatchStats {
  double loss = 0.0;
  double log_mean = 0.0;  // mean ln(mu * y.w) over the batch
  int t_start = 0;
};

struct EvalStats {
  double portfolio_value = 1.0;  // product of mu * y.w over the span
  double log_mean = 0.0;
  double log_mean_free = 0.0;  // commission ignored
  double loss = 0.0;           // -log_mean + weight penalty
  int decisions = 0;
};

// gradient ascent on the mean log return of the policy over sampled
// history windows. the memory supplies each sample's previous weights and
// receives the fresh outputs, so consecutive decisions stay coupled
// without backpropagating across batch elements.
class Trainer {
 public:
  Trainer(policy::PolicyNetwork& net, const market::GlobalPriceMatrix& mat, TrainingConfig cfg)
      : net_(&net),
        mat_(&mat),
        cfg_(cfg),
        pvm_(int(mat.periods.size()), net.m),
        ev_(net.graph),
        adam_(net.graph),
        rng_(cfg.seed) {
    cfg_.validate();
    if (int(mat.assets.size()) != net.m)
      throw validation_error("trainer: market has " + std::to_string(mat.assets.size()) +
                             " assets but the network expects " + std::to_string(net.m));
    if (int(mat.periods.size()) < net.n + 1)
      throw validation_error("trainer: history shorter than one input window");
  }

  // earliest period with a full input window behind it
  int t_min() const { return net_->n - 1; }
  // latest decidable period: the move into t+1 must exist
  int t_max() const { return int(mat_->periods.size()) - 2; }

  Pvm& pvm() { return pvm_; }
  const Pvm& pvm() const { return pvm_; }
  const TrainingConfig& config() const { return cfg_; }

  portfolio::Weights weights_before(int t) const {
    return t == 0 ? portfolio::Weights(size_t(net_->m) + 1, 1.0 / double(net_->m + 1))
                  : pvm_.read(t - 1);
  }

  // loss over the batch starting at t_start, a pure function of the
  // parameters (the memory rows it reads are left untouched)
  double batch_loss(int t_start) { return run_batch(t_start, nullptr, nullptr); }

  std::pair<double, std::vector<ad::Tensor>> batch_backward(int t_start) {
    std::vector<ad::Tensor> grads = zero_grads();
    double loss = run_batch(t_start, &grads, nullptr);
    return {loss, std::move(grads)};
  }

  // one optimization step on a batch drawn from [t_min, t_now - n_b]
  BatchStats batch_update(int t_now, double lr) { return batch_update_with(t_now, lr, cfg_.buffer_decay); }

  BatchStats batch_update_with(int t_now, double lr, double buffer_decay) {
    int t_start = sample_batch_start(rng_, t_min(), t_now, cfg_.batch_size, buffer_decay);
    std::vector<ad::Tensor> grads = zero_grads();
    std::vector<portfolio::Weights> outputs;
    BatchStats st;
    st.t_start = t_start;
    st.loss = run_batch(t_start, &grads, &outputs);
    st.log_mean = penalty() - st.loss;
    adam_.step(net_->graph, grads, lr);
    for (int j = 0; j < cfg_.batch_size; ++j) pvm_.write(t_start + j, outputs[size_t(j)]);
    return st;
  }

  // offline pass over [0, train_end): every batch may end at the last
  // decidable period. progress lines report the held-out span
  // [train_end, eval_end) exactly as the final backtest will replay it.
  void train_offline(int train_end, int eval_end, std::ostream* log = nullptr) {
    if (train_end < t_min() + cfg_.batch_size + 1)
      throw range_error("train_offline: training span too short for one batch");
    if (train_end > int(mat_->periods.size()))
      throw range_error("train_offline: training span exceeds the history");
    for (int step = 0; step < cfg_.steps; ++step) {
      batch_update(train_end - 1, cfg_.learning_rate);
      if (log && cfg_.log_every > 0 && (step + 1) % cfg_.log_every == 0) {
        EvalStats es = evaluate_split(train_end, eval_end, false);
        *log << "step " << (step + 1) << "\n"
             << "the portfolio value on test set is " << es.portfolio_value << "\n"
             << "log_mean is " << es.log_mean << "\n"
             << "loss_value is " << es.loss << "\n"
             << "log mean without commission fee is " << es.log_mean_free << "\n";
      }
    }
  }

  // chained replay of [t_start, t_end): each decision feeds the next
  // one's previous-weights input, commission via the exact remainder
  EvalStats evaluate_split(int t_start, int t_end, bool write_rows) {
    if (t_start < t_min() || t_start >= t_end || t_end > int(mat_->periods.size()))
      throw range_error("evaluate_split: bad span [" + std::to_string(t_start) + "," +
                        std::to_string(t_end) + ")");
    EvalStats es;
    portfolio::Weights w_prev = weights_before(t_start);
    double sum_log = 0.0, sum_free = 0.0;
    for (int t = t_start; t <= std::min(t_end - 2, t_max()); ++t) {
      portfolio::Weights w = policy::decide_with(*net_, ev_, market::price_tensor(*mat_, t, net_->n), w_prev);
      portfolio::Weights evolved =
          t == 0 ? w_prev : portfolio::evolved_weights(market::relative_price(*mat_, t), w_prev);
      double mu = portfolio::transaction_remainder(evolved, w, cfg_.commissions);
      portfolio::Weights y_next = market::relative_price(*mat_, t + 1);
      double gross = 0.0;
      for (size_t i = 0; i < w.size(); ++i) gross += y_next[i] * w[i];
      es.portfolio_value *= mu * gross;
      sum_log += std::log(mu * gross);
      sum_free += std::log(gross);
      ++es.decisions;
      if (write_rows) pvm_.write(t, w);
      w_prev = std::move(w);
    }
    if (es.decisions > 0) {
      es.log_mean = sum_log / es.decisions;
      es.log_mean_free = sum_free / es.decisions;
    }
    es.loss = -es.log_mean + penalty();
    return es;
  }

  // online refresh once the move into t_now is known
  void rolling_train(int t_now) {
    if (t_now < t_min() + cfg_.batch_size) return;  // not enough history yet
    for (int i = 0; i < cfg_.rolling_steps; ++i)
      batch_update_with(t_now, cfg_.rolling_learning_rate, cfg_.rolling_buffer_decay);
  }

  // sum of the registered decay penalties at the current parameters
  double penalty() const {
    double s = 0.0;
    for (auto [pid, decay] : net_->weight_decays) {
      const ad::Tensor& w = net_->graph.param_value(pid);
      double q = 0.0;
      for (int i = 0; i < w.size(); ++i) q += w[i] * w[i];
      s += decay * q;
    }
    return s;
  }

 private:
  std::vector<ad::Tensor> zero_grads() const {
    std::vector<ad::Tensor> g;
    g.reserve(size_t(net_->graph.param_count()));
    for (int p = 0; p < net_->graph.param_count(); ++p)
      g.emplace_back(net_->graph.param_value(p).shape());
    return g;
  }

  // forward (and optionally backward) the batch starting at t_start.
  // previous weights come from memory rows snapshotted up front, so the
  // loss differentiates as a function of the parameters alone.
  double run_batch(int t_start, std::vector<ad::Tensor>* grads, std::vector<portfolio::Weights>* outputs) {
    const int n_b = cfg_.batch_size;
    if (t_start < t_min() || t_start + n_b - 1 > t_max())
      throw range_error("batch at " + std::to_string(t_start) + " leaves the decidable range");

    std::vector<portfolio::Weights> prev;
    prev.reserve(size_t(n_b));
    for (int j = 0; j < n_b; ++j) prev.push_back(weights_before(t_start + j));

    const int m1 = net_->m + 1;
    double sum_log = 0.0;
    for (int j = 0; j < n_b; ++j) {
      const int t = t_start + j;
      ev_.bind("x", market::price_tensor(*mat_, t, net_->n));
      ev_.bind("w_prev", policy::wprev_input(*net_, prev[size_t(j)]));
      ev_.forward(net_->out_node);
      const ad::Tensor& out = ev_.value(net_->out_node);
      portfolio::Weights w(out.data(), out.data() + m1);

      portfolio::Weights evolved =
          t == 0 ? prev[0] : portfolio::evolved_weights(market::relative_price(*mat_, t), prev[size_t(j)]);
      double mu;
      portfolio::Weights dmu;
      if (cfg_.fast_train) {
        double c = 0.5 * (cfg_.commissions.sell + cfg_.commissions.buy);
        mu = portfolio::transaction_remainder_approx(evolved, w, c);
        if (grads) dmu = portfolio::remainder_gradient_approx(evolved, w, c, mu);
      } else {
        mu = portfolio::transaction_remainder(evolved, w, cfg_.commissions);
        if (grads) dmu = portfolio::remainder_gradient(evolved, w, cfg_.commissions, mu);
      }

      portfolio::Weights y_next = market::relative_price(*mat_, t + 1);
      double gross = 0.0;
      for (int i = 0; i < m1; ++i) gross += y_next[size_t(i)] * w[size_t(i)];
      sum_log += std::log(mu * gross);

      if (grads) {
        ad::Tensor seed({m1});
        for (int i = 0; i < m1; ++i)
          seed[i] = -(dmu[size_t(i)] / mu + y_next[size_t(i)] / gross) / double(n_b);
        ev_.backward_from(net_->out_node, seed);
        for (int p = 0; p < net_->graph.param_count(); ++p) {
          const ad::Tensor& g = ev_.grad(net_->graph.param_node(p));
          ad::Tensor& acc = (*grads)[size_t(p)];
          for (int i = 0; i < acc.size(); ++i) acc[i] += g[i];
        }
      }
      if (outputs) outputs->push_back(std::move(w));
    }

    double loss = -sum_log / n_b + penalty();
    if (grads) {
      for (auto [pid, decay] : net_->weight_decays) {
        const ad::Tensor& w = net_->graph.param_value(pid);
        ad::Tensor& acc = (*grads)[size_t(pid)];
        for (int i = 0; i < w.size(); ++i) acc[i] += 2.0 * decay * w[i];
      }
      for (const ad::Tensor& g : *grads)
        for (int i = 0; i < g.size(); ++i)
          if (!std::isfinite(g[i])) throw numerical_error("training gradient is not finite");
    }
    if (!std::isfinite(loss)) throw numerical_error("training loss is not finite");
    return loss;
  }

  policy::PolicyNetwork* net_;
  const market::GlobalPriceMatrix* mat_;
  TrainingConfig cfg_;
  Pvm pvm_;
  ad::Eval ev_;
  ad::AdamState adam_;
  std::mt19937_64 rng_;
};

}  // namespace portlab::train
