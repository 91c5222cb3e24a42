#pragma once

#include <cmath>
#include <vector>

#include "portlab/ad/graph.hpp"
#include "portlab/errors.hpp"

namespace portlab::ad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// first/second moment state per parameter; step counts completed updates.
// the caller owns the parameters exclusively while stepping.
class AdamState {
 public:
  explicit AdamState(const Graph& g, AdamConfig cfg = {}) : cfg_(cfg) {
    m_.reserve(size_t(g.param_count()));
    v_.reserve(size_t(g.param_count()));
    for (int p = 0; p < g.param_count(); ++p) {
      m_.push_back(Tensor(g.param_value(p).shape()));
      v_.push_back(Tensor(g.param_value(p).shape()));
    }
  }

  long steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

  // gradient-descent update on the given loss gradients
  void step(Graph& g, const std::vector<Tensor>& grads, double lr) {
    if (int(grads.size()) != g.param_count())
      throw structural_error("adam: gradient count does not match parameter count");
    for (int p = 0; p < g.param_count(); ++p)
      if (!grads[size_t(p)].same_shape(g.param_value(p)))
        throw structural_error("adam: gradient shape mismatch for '" + g.param_name(p) + "'");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, double(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, double(step_));
    for (int p = 0; p < g.param_count(); ++p) {
      Tensor& theta = g.param_value(p);
      Tensor& m = m_[size_t(p)];
      Tensor& v = v_[size_t(p)];
      const Tensor& grd = grads[size_t(p)];
      for (int i = 0; i < theta.size(); ++i) {
        double gi = grd[i];
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  long step_ = 0;
};

}  // namespace portlab::ad
