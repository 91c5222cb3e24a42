#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "portlab/ad/graph.hpp"

namespace portlab::ad {

struct GradCheckEntry {
  std::string param;
  double max_rel_err = 0.0;
  bool ok = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  bool ok = true;
};

// central finite differences against the analytic backward pass.
// relative error uses max(|analytic|, |numeric|, 1e-4) as the denominator so
// near-zero gradients are compared on an absolute scale.
inline GradCheckReport gradient_check(Graph& g,
                                      const std::vector<std::pair<std::string, Tensor>>& inputs,
                                      int loss_node, double tolerance, double step = 1e-6) {
  Eval ev(g);
  for (const auto& [name, v] : inputs) ev.bind(name, v);
  ev.forward(loss_node);
  if (ev.value(loss_node).size() != 1) throw structural_error("gradient_check: loss node must be scalar");
  ev.backward(loss_node);

  std::vector<Tensor> analytic;
  analytic.reserve(size_t(g.param_count()));
  for (int p = 0; p < g.param_count(); ++p) analytic.push_back(ev.grad(g.param_node(p)));

  GradCheckReport report;
  for (int p = 0; p < g.param_count(); ++p) {
    GradCheckEntry entry;
    entry.param = g.param_name(p);
    Tensor& theta = g.param_value(p);
    for (int i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      const double h = step * std::max(1.0, std::abs(saved));
      theta[i] = saved + h;
      ev.forward(loss_node);
      const double fp = ev.value(loss_node)[0];
      theta[i] = saved - h;
      ev.forward(loss_node);
      const double fm = ev.value(loss_node)[0];
      theta[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[size_t(p)][i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    entry.ok = entry.max_rel_err <= tolerance;
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.ok = report.ok && entry.ok;
    report.entries.push_back(std::move(entry));
  }
  // leave the workspace consistent with the restored parameters
  ev.forward(loss_node);
  return report;
}

}  // namespace portlab::ad
