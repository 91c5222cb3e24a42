#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "portlab/ad/cells.hpp"
#include "portlab/ad/checkpoint.hpp"
#include "portlab/ad/graph.hpp"
#include "portlab/errors.hpp"
#include "portlab/policy/topology.hpp"
#include "portlab/portfolio/math.hpp"

namespace portlab::policy {

// one shared evaluator applied to every asset, plus the cash-bias/softmax
// head. inputs: "x" (f, m, n) price tensor, "w_prev" the previous non-cash
// weights. output node holds the next portfolio vector (m+1, cash first).
struct PolicyNetwork {
  EiieTopologySpec spec;
  int m = 0, n = 0, f = 0;
  uint64_t seed = 0;
  ad::Graph graph;
  int x_node = -1;
  int wprev_node = -1;
  int out_node = -1;
  std::vector<std::pair<int, double>> weight_decays;  // (param id, decay), weights only
};

namespace detail {

inline ad::Tensor glorot(std::mt19937_64& rng, std::vector<int> shape, int fan_in, int fan_out) {
  double bound = std::sqrt(6.0 / double(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  ad::Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

}  // namespace detail

inline PolicyNetwork build_network(const EiieTopologySpec& spec, int m, int n, int f, uint64_t seed) {
  if (m < 1) throw config_error("build_network: need at least one non-cash asset");
  if (n < 1) throw config_error("build_network: window must be positive");
  if (f < 1) throw config_error("build_network: need at least one feature plane");

  PolicyNetwork net;
  net.spec = spec;
  net.m = m;
  net.n = n;
  net.f = f;
  net.seed = seed;
  std::mt19937_64 rng(seed);
  ad::Graph& g = net.graph;

  net.x_node = g.input("x", {f, m, n});
  int scores;  // node holding (1, m) voting scores

  if (spec.kind == NetKind::cnn) {
    net.wprev_node = g.input("w_prev", {1, m, 1});
    int cur = net.x_node;
    int width = n, channels = f;
    for (size_t li = 0; li + 1 < spec.layers.size(); ++li) {
      const LayerSpec& l = spec.layers[li];
      int k = l.type == "ConvLayer" ? l.filter_shape[1] : width;
      if (k > width)
        throw config_error("topology: layer " + std::to_string(li) + " kernel width " + std::to_string(k) +
                           " exceeds the remaining window " + std::to_string(width));
      std::string base = (l.type == "ConvLayer" ? "conv" : "dense") + std::to_string(li);
      int w = g.parameter(base + "/W",
                          detail::glorot(rng, {l.filter_number, channels, k}, channels * k, l.filter_number * k));
      int b = g.parameter(base + "/b", ad::Tensor({l.filter_number}));
      if (l.regularizer == "L2") net.weight_decays.emplace_back(g.find_param(base + "/W"), l.weight_decay);
      cur = g.relu(g.conv_row(cur, w, b));
      width = width - k + 1;
      channels = l.filter_number;
    }
    if (width != 1)
      throw config_error("topology: the scoring layer needs unit time width, got " + std::to_string(width) +
                         "; add a full-width EIIE_Dense layer before EIIE_Output_WithW");
    const LayerSpec& out = spec.layers.back();
    int merged = g.concat_chan(cur, net.wprev_node);  // (channels+1, m, 1)
    int w = g.parameter("score/W", detail::glorot(rng, {1, channels + 1, 1}, channels + 1, 1));
    int b = g.parameter("score/b", ad::Tensor({1}));
    if (out.regularizer == "L2") net.weight_decays.emplace_back(g.find_param("score/W"), out.weight_decay);
    scores = g.reshape(g.conv_row(merged, w, b), {1, m});
  } else {
    net.wprev_node = g.input("w_prev", {m, 1});
    const LayerSpec& rec = spec.layers.front();
    const int hidden = rec.neuron_number;
    int h = g.constant(ad::Tensor({m, hidden}));
    int c = h;
    int wx, wh, b;
    if (spec.kind == NetKind::lstm) {
      wx = g.parameter("lstm0/Wx", detail::glorot(rng, {f, 4 * hidden}, f, 4 * hidden));
      wh = g.parameter("lstm0/Wh", detail::glorot(rng, {hidden, 4 * hidden}, hidden, 4 * hidden));
      b = g.parameter("lstm0/b", ad::Tensor({4 * hidden}));
    } else {
      wx = g.parameter("rnn0/Wx", detail::glorot(rng, {f, hidden}, f, hidden));
      wh = g.parameter("rnn0/Wh", detail::glorot(rng, {hidden, hidden}, hidden, hidden));
      b = g.parameter("rnn0/b", ad::Tensor({hidden}));
    }
    if (rec.regularizer == "L2") {
      net.weight_decays.emplace_back(net.graph.find_param(spec.kind == NetKind::lstm ? "lstm0/Wx" : "rnn0/Wx"),
                                     rec.weight_decay);
      net.weight_decays.emplace_back(net.graph.find_param(spec.kind == NetKind::lstm ? "lstm0/Wh" : "rnn0/Wh"),
                                     rec.weight_decay);
    }
    for (int t = 0; t < n; ++t) {
      int xt = g.time_slice(net.x_node, t);
      if (spec.kind == NetKind::lstm) {
        auto o = ad::lstm_cell(g, xt, h, c, wx, wh, b, hidden);
        h = o.h;
        c = o.c;
      } else {
        h = ad::rnn_cell(g, xt, h, wx, wh, b);
      }
    }
    const LayerSpec& out = spec.layers.back();
    int hw = g.concat_cols(h, net.wprev_node);  // (m, hidden+1)
    int w = g.parameter("score/W", detail::glorot(rng, {hidden + 1, 1}, hidden + 1, 1));
    int sb = g.parameter("score/b", ad::Tensor({1}));
    if (out.regularizer == "L2") net.weight_decays.emplace_back(g.find_param("score/W"), out.weight_decay);
    scores = g.reshape(g.add_row_bias(g.matmul(hw, w), sb), {1, m});
  }

  int cash = g.parameter("cash_bias", ad::Tensor({1, 1}));
  int full = g.concat_cols(cash, scores);  // (1, m+1), cash first
  net.out_node = g.softmax(g.reshape(full, {m + 1}));
  return net;
}

// shape the non-cash slice of w_prev for the network's input layout
inline ad::Tensor wprev_input(const PolicyNetwork& net, const portfolio::Weights& w_prev) {
  ad::Tensor t(net.spec.kind == NetKind::cnn ? std::vector<int>{1, net.m, 1} : std::vector<int>{net.m, 1});
  for (int i = 0; i < net.m; ++i) t[i] = w_prev[size_t(i) + 1];
  return t;
}

inline void validate_price_tensor(const PolicyNetwork& net, const ad::Tensor& x) {
  if (x.shape() != std::vector<int>{net.f, net.m, net.n})
    throw validation_error("decide: price tensor shape " + ad::Tensor::shape_str(x.shape()) +
                           " does not match the network " +
                           ad::Tensor::shape_str({net.f, net.m, net.n}));
  for (int i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0)) throw validation_error("decide: price tensor entries must be positive");
}

// evaluate the policy in a caller-owned workspace (reusable across calls)
inline portfolio::Weights decide_with(const PolicyNetwork& net, ad::Eval& ev, const ad::Tensor& x,
                                      const portfolio::Weights& w_prev) {
  validate_price_tensor(net, x);
  if (int(w_prev.size()) != net.m + 1)
    throw validation_error("decide: w_prev has " + std::to_string(w_prev.size()) + " slots, expected " +
                           std::to_string(net.m + 1));
  portfolio::validate_simplex(w_prev, "decide: w_prev");
  ev.bind("x", x);
  ev.bind("w_prev", wprev_input(net, w_prev));
  ev.forward(net.out_node);
  const ad::Tensor& out = ev.value(net.out_node);
  return portfolio::Weights(out.data(), out.data() + out.size());
}

// read-only on the network; safe to call from multiple threads concurrently
inline portfolio::Weights decide(const PolicyNetwork& net, const ad::Tensor& x,
                                 const portfolio::Weights& w_prev) {
  ad::Eval ev(net.graph);
  return decide_with(net, ev, x, w_prev);
}

inline void save_network(const PolicyNetwork& net, const std::string& path) {
  nlohmann::json meta;
  meta["layers"] = net.spec.to_json();
  meta["kind"] = net_kind_name(net.spec.kind);
  meta["m"] = net.m;
  meta["n"] = net.n;
  meta["f"] = net.f;
  meta["seed"] = net.seed;
  ad::save_checkpoint(path, meta, net.graph);
}

inline PolicyNetwork load_network(const std::string& path) {
  auto ck = ad::load_checkpoint(path);
  if (!ck.meta.contains("layers")) throw parse_error("checkpoint has no network manifest: " + path);
  auto spec = EiieTopologySpec::from_json(ck.meta.at("layers"));
  PolicyNetwork net = build_network(spec, ck.meta.at("m").get<int>(), ck.meta.at("n").get<int>(),
                                    ck.meta.at("f").get<int>(), ck.meta.value("seed", uint64_t(0)));
  ad::restore_params(net.graph, ck);
  return net;
}

}  // namespace portlab::policy
