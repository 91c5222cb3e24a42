#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "portlab/ad/tensor.hpp"
#include "portlab/errors.hpp"

namespace portlab::ad {

enum class Op : uint8_t {
  kInput,
  kParam,
  kConst,
  kConvRow,     // (Cin,M,T) * (Cout,Cin,K) + (Cout) -> (Cout,M,T-K+1)
  kMatMul,      // (P,Q) x (Q,R) -> (P,R)
  kAddRowBias,  // (P,Q) + (Q) broadcast over rows
  kAdd,
  kMul,
  kRelu,
  kTanh,
  kSigmoid,
  kLog,
  kSliceCols,   // (P,Q) -> (P, hi-lo)
  kTimeSlice,   // (F,M,N) at time j -> (M,F)
  kConcatCols,  // (P,Qa) ++ (P,Qb) -> (P,Qa+Qb)
  kConcatChan,  // (Ca,M,T) ++ (Cb,M,T) -> (Ca+Cb,M,T)
  kReshape,
  kScale,    // x * alpha
  kSoftmax,  // over all elements
  kMeanAll,  // -> (1)
  kL2,       // alpha * sum(x^2) -> (1)
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kParam: return "param";
    case Op::kConst: return "const";
    case Op::kConvRow: return "conv_row";
    case Op::kMatMul: return "matmul";
    case Op::kAddRowBias: return "add_row_bias";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kRelu: return "relu";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kLog: return "log";
    case Op::kSliceCols: return "slice_cols";
    case Op::kTimeSlice: return "time_slice";
    case Op::kConcatCols: return "concat_cols";
    case Op::kConcatChan: return "concat_chan";
    case Op::kReshape: return "reshape";
    case Op::kScale: return "scale";
    case Op::kSoftmax: return "softmax";
    case Op::kMeanAll: return "mean_all";
    case Op::kL2: return "l2";
  }
  return "?";
}

struct Node {
  Op op;
  std::vector<int> in;
  std::vector<int> shape;
  int param = -1;      // kParam: index into the parameter table
  int a = 0, b = 0;    // slice bounds / time index
  double alpha = 0.0;  // scale factor / penalty coefficient
  std::string name;    // inputs and parameters
  Tensor cval;         // kConst payload
};

// static computation graph; nodes are appended in topological order and the
// structure never changes after building. parameter VALUES are mutable (the
// optimizer owns them during updates); everything else is read-only, so any
// number of Eval workspaces may run forward/backward concurrently.
class Graph {
 public:
  int input(std::string name, std::vector<int> shape) {
    if (inputs_.count(name)) throw structural_error("duplicate input name '" + name + "'");
    Node n;
    n.op = Op::kInput;
    n.shape = std::move(shape);
    Tensor check(n.shape);  // validates dims
    n.name = name;
    int id = push(std::move(n));
    inputs_.emplace(std::move(name), id);
    return id;
  }

  int parameter(std::string name, Tensor init) {
    for (const auto& p : params_)
      if (p.name == name) throw structural_error("duplicate parameter name '" + name + "'");
    Node n;
    n.op = Op::kParam;
    n.shape = init.shape();
    n.param = int(params_.size());
    n.name = name;
    int id = push(std::move(n));
    params_.push_back(Param{std::move(name), std::move(init), id});
    return id;
  }

  int constant(Tensor value) {
    Node n;
    n.op = Op::kConst;
    n.shape = value.shape();
    n.cval = std::move(value);
    return push(std::move(n));
  }

  int conv_row(int x, int w, int b) {
    const auto& xs = shape_of(x, "conv_row");
    const auto& ws = shape_of(w, "conv_row");
    const auto& bs = shape_of(b, "conv_row");
    if (xs.size() != 3 || ws.size() != 3 || bs.size() != 1) bad(nodes_.size(), Op::kConvRow, "needs rank-3 input, rank-3 kernel, rank-1 bias");
    if (ws[1] != xs[0]) bad(nodes_.size(), Op::kConvRow, "kernel channel count does not match input");
    if (ws[2] > xs[2]) bad(nodes_.size(), Op::kConvRow, "kernel wider than input");
    if (bs[0] != ws[0]) bad(nodes_.size(), Op::kConvRow, "bias length does not match filter count");
    Node n;
    n.op = Op::kConvRow;
    n.in = {x, w, b};
    n.shape = {ws[0], xs[1], xs[2] - ws[2] + 1};
    return push(std::move(n));
  }

  int matmul(int a, int b) {
    const auto& as = shape_of(a, "matmul");
    const auto& bs = shape_of(b, "matmul");
    if (as.size() != 2 || bs.size() != 2 || as[1] != bs[0]) bad(nodes_.size(), Op::kMatMul, "inner dimensions disagree");
    Node n;
    n.op = Op::kMatMul;
    n.in = {a, b};
    n.shape = {as[0], bs[1]};
    return push(std::move(n));
  }

  int add_row_bias(int x, int b) {
    const auto& xs = shape_of(x, "add_row_bias");
    const auto& bs = shape_of(b, "add_row_bias");
    if (xs.size() != 2 || bs.size() != 1 || bs[0] != xs[1]) bad(nodes_.size(), Op::kAddRowBias, "bias length must equal column count");
    Node n;
    n.op = Op::kAddRowBias;
    n.in = {x, b};
    n.shape = xs;
    return push(std::move(n));
  }

  int add(int a, int b) { return binary(Op::kAdd, a, b); }
  int mul(int a, int b) { return binary(Op::kMul, a, b); }

  int relu(int x) { return unary(Op::kRelu, x); }
  int tanh_(int x) { return unary(Op::kTanh, x); }
  int sigmoid(int x) { return unary(Op::kSigmoid, x); }
  int log_(int x) { return unary(Op::kLog, x); }

  int slice_cols(int x, int lo, int hi) {
    const auto& xs = shape_of(x, "slice_cols");
    if (xs.size() != 2 || lo < 0 || hi > xs[1] || lo >= hi) bad(nodes_.size(), Op::kSliceCols, "bad column range");
    Node n;
    n.op = Op::kSliceCols;
    n.in = {x};
    n.a = lo;
    n.b = hi;
    n.shape = {xs[0], hi - lo};
    return push(std::move(n));
  }

  int time_slice(int x, int t) {
    const auto& xs = shape_of(x, "time_slice");
    if (xs.size() != 3 || t < 0 || t >= xs[2]) bad(nodes_.size(), Op::kTimeSlice, "time index outside input width");
    Node n;
    n.op = Op::kTimeSlice;
    n.in = {x};
    n.a = t;
    n.shape = {xs[1], xs[0]};
    return push(std::move(n));
  }

  int concat_cols(int a, int b) {
    const auto& as = shape_of(a, "concat_cols");
    const auto& bs = shape_of(b, "concat_cols");
    if (as.size() != 2 || bs.size() != 2 || as[0] != bs[0]) bad(nodes_.size(), Op::kConcatCols, "row counts differ");
    Node n;
    n.op = Op::kConcatCols;
    n.in = {a, b};
    n.shape = {as[0], as[1] + bs[1]};
    return push(std::move(n));
  }

  int concat_chan(int a, int b) {
    const auto& as = shape_of(a, "concat_chan");
    const auto& bs = shape_of(b, "concat_chan");
    if (as.size() != 3 || bs.size() != 3 || as[1] != bs[1] || as[2] != bs[2]) bad(nodes_.size(), Op::kConcatChan, "trailing dimensions differ");
    Node n;
    n.op = Op::kConcatChan;
    n.in = {a, b};
    n.shape = {as[0] + bs[0], as[1], as[2]};
    return push(std::move(n));
  }

  int reshape(int x, std::vector<int> shape) {
    const auto& xs = shape_of(x, "reshape");
    int64_t have = 1, want = 1;
    for (int d : xs) have *= d;
    for (int d : shape) {
      if (d <= 0) bad(nodes_.size(), Op::kReshape, "dimensions must be positive");
      want *= d;
    }
    if (have != want) bad(nodes_.size(), Op::kReshape, "element count changes");
    Node n;
    n.op = Op::kReshape;
    n.in = {x};
    n.shape = std::move(shape);
    return push(std::move(n));
  }

  int scale(int x, double alpha) {
    Node n;
    n.op = Op::kScale;
    n.in = {x};
    n.alpha = alpha;
    n.shape = shape_of(x, "scale");
    return push(std::move(n));
  }

  int softmax(int x) { return unary(Op::kSoftmax, x); }

  int mean_all(int x) {
    Node n;
    n.op = Op::kMeanAll;
    n.in = {x};
    n.shape = {1};
    shape_of(x, "mean_all");
    return push(std::move(n));
  }

  int l2_penalty(int x, double alpha) {
    Node n;
    n.op = Op::kL2;
    n.in = {x};
    n.alpha = alpha;
    n.shape = {1};
    shape_of(x, "l2");
    return push(std::move(n));
  }

  int size() const { return int(nodes_.size()); }
  const Node& node(int id) const { return nodes_[size_t(id)]; }

  int input_id(std::string_view name) const {
    auto it = inputs_.find(std::string(name));
    if (it == inputs_.end()) throw structural_error("no input named '" + std::string(name) + "'");
    return it->second;
  }

  int param_count() const { return int(params_.size()); }
  const std::string& param_name(int pid) const { return params_[size_t(pid)].name; }
  Tensor& param_value(int pid) { return params_[size_t(pid)].value; }
  const Tensor& param_value(int pid) const { return params_[size_t(pid)].value; }
  int param_node(int pid) const { return params_[size_t(pid)].node; }

  int find_param(std::string_view name) const {
    for (int i = 0; i < param_count(); ++i)
      if (params_[size_t(i)].name == name) return i;
    return -1;
  }

 private:
  struct Param {
    std::string name;
    Tensor value;
    int node;
  };

  [[noreturn]] void bad(size_t id, Op op, const std::string& why) const {
    throw structural_error("node " + std::to_string(id) + " (" + op_name(op) + "): " + why);
  }

  const std::vector<int>& shape_of(int id, const char* ctx) const {
    if (id < 0 || id >= size()) throw structural_error(std::string(ctx) + ": input node id out of range");
    return nodes_[size_t(id)].shape;
  }

  int binary(Op op, int a, int b) {
    const auto& as = shape_of(a, op_name(op));
    const auto& bs = shape_of(b, op_name(op));
    if (as != bs) bad(nodes_.size(), op, "operand shapes differ " + Tensor::shape_str(as) + " vs " + Tensor::shape_str(bs));
    Node n;
    n.op = op;
    n.in = {a, b};
    n.shape = as;
    return push(std::move(n));
  }

  int unary(Op op, int x) {
    Node n;
    n.op = op;
    n.in = {x};
    n.shape = shape_of(x, op_name(op));
    return push(std::move(n));
  }

  int push(Node n) {
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
  std::vector<Param> params_;
  std::map<std::string, int> inputs_;
};

// per-run workspace: values and gradients for every node. create one per
// thread; forward/backward never touch graph state except parameter reads.
class Eval {
 public:
  explicit Eval(const Graph& g) : g_(&g) {
    int n = g.size();
    val_.reserve(size_t(n));
    grad_.reserve(size_t(n));
    bound_.assign(size_t(n), 0);
    for (int i = 0; i < n; ++i) {
      const Node& nd = g.node(i);
      if (nd.op == Op::kConst)
        val_.push_back(nd.cval);
      else
        val_.push_back(Tensor(nd.shape));
      grad_.push_back(Tensor(nd.shape));
    }
  }

  void bind(std::string_view name, const Tensor& v) {
    int id = g_->input_id(name);
    const Node& nd = g_->node(id);
    if (v.shape() != nd.shape)
      throw structural_error("input '" + std::string(name) + "' expects shape " + Tensor::shape_str(nd.shape) +
                             ", got " + Tensor::shape_str(v.shape()));
    val_[size_t(id)].values() = v.values();
    bound_[size_t(id)] = 1;
  }

  void forward(int upto) {
    if (upto < 0 || upto >= g_->size()) throw structural_error("forward: node id out of range");
    for (int id = 0; id <= upto; ++id) compute(id);
  }

  const Tensor& value(int id) const { return val_[size_t(id)]; }
  const Tensor& grad(int id) const { return grad_[size_t(id)]; }

  void backward(int loss) {
    if (val_[size_t(loss)].size() != 1) throw structural_error("backward: loss node must be scalar");
    Tensor seed(g_->node(loss).shape);
    seed[0] = 1.0;
    backward_from(loss, seed);
  }

  void backward_from(int node, const Tensor& seed) {
    if (node < 0 || node >= g_->size()) throw structural_error("backward: node id out of range");
    if (seed.shape() != g_->node(node).shape) throw structural_error("backward: seed shape mismatch");
    for (int id = 0; id <= node; ++id) grad_[size_t(id)].fill(0.0);
    grad_[size_t(node)].values() = seed.values();
    for (int id = node; id >= 0; --id) push_grad(id);
  }

 private:
  void compute(int id) {
    const Node& nd = g_->node(id);
    Tensor& out = val_[size_t(id)];
    switch (nd.op) {
      case Op::kConst:
        return;  // fixed at construction
      case Op::kInput:
        if (!bound_[size_t(id)])
          throw structural_error("input '" + nd.name + "' evaluated before binding");
        return;
      case Op::kParam:
        out.values() = g_->param_value(nd.param).values();
        return;
      case Op::kConvRow: {
        const Tensor& x = val_[size_t(nd.in[0])];
        const Tensor& w = val_[size_t(nd.in[1])];
        const Tensor& b = val_[size_t(nd.in[2])];
        int co = w.dim(0), ci = w.dim(1), k = w.dim(2);
        int m = x.dim(1), to = out.dim(2);
        for (int o = 0; o < co; ++o)
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < to; ++j) {
              double s = b[o];
              for (int c = 0; c < ci; ++c)
                for (int d = 0; d < k; ++d) s += w.at3(o, c, d) * x.at3(c, i, j + d);
              out.at3(o, i, j) = s;
            }
        return;
      }
      case Op::kMatMul: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        int p = a.dim(0), q = a.dim(1), r = b.dim(1);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < r; ++j) {
            double s = 0.0;
            for (int t = 0; t < q; ++t) s += a.at2(i, t) * b.at2(t, j);
            out.at2(i, j) = s;
          }
        return;
      }
      case Op::kAddRowBias: {
        const Tensor& x = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        int p = x.dim(0), q = x.dim(1);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) out.at2(i, j) = x.at2(i, j) + b[j];
        return;
      }
      case Op::kAdd: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        for (int i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
        return;
      }
      case Op::kMul: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        for (int i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
        return;
      }
      case Op::kRelu: {
        const Tensor& x = val_[size_t(nd.in[0])];
        for (int i = 0; i < out.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
        return;
      }
      case Op::kTanh: {
        const Tensor& x = val_[size_t(nd.in[0])];
        for (int i = 0; i < out.size(); ++i) out[i] = std::tanh(x[i]);
        return;
      }
      case Op::kSigmoid: {
        const Tensor& x = val_[size_t(nd.in[0])];
        for (int i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
        return;
      }
      case Op::kLog: {
        const Tensor& x = val_[size_t(nd.in[0])];
        for (int i = 0; i < out.size(); ++i) out[i] = std::log(x[i]);
        return;
      }
      case Op::kSliceCols: {
        const Tensor& x = val_[size_t(nd.in[0])];
        int p = out.dim(0), q = out.dim(1);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) out.at2(i, j) = x.at2(i, nd.a + j);
        return;
      }
      case Op::kTimeSlice: {
        const Tensor& x = val_[size_t(nd.in[0])];
        int m = out.dim(0), f = out.dim(1);
        for (int i = 0; i < m; ++i)
          for (int c = 0; c < f; ++c) out.at2(i, c) = x.at3(c, i, nd.a);
        return;
      }
      case Op::kConcatCols: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        int p = out.dim(0), qa = a.dim(1), qb = b.dim(1);
        for (int i = 0; i < p; ++i) {
          for (int j = 0; j < qa; ++j) out.at2(i, j) = a.at2(i, j);
          for (int j = 0; j < qb; ++j) out.at2(i, qa + j) = b.at2(i, j);
        }
        return;
      }
      case Op::kConcatChan: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        std::copy(a.data(), a.data() + a.size(), out.data());
        std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
        return;
      }
      case Op::kReshape: {
        const Tensor& x = val_[size_t(nd.in[0])];
        out.values() = x.values();
        return;
      }
      case Op::kScale: {
        const Tensor& x = val_[size_t(nd.in[0])];
        for (int i = 0; i < out.size(); ++i) out[i] = nd.alpha * x[i];
        return;
      }
      case Op::kSoftmax: {
        const Tensor& x = val_[size_t(nd.in[0])];
        double mx = x[0];
        for (int i = 1; i < x.size(); ++i) mx = std::max(mx, x[i]);
        std::vector<double> e(size_t(x.size()));
        for (int i = 0; i < x.size(); ++i) e[size_t(i)] = std::exp(x[i] - mx);
        // sum in sorted order so the normalizer is identical under any
        // permutation of the inputs (bitwise equivariance)
        std::vector<double> sorted = e;
        std::sort(sorted.begin(), sorted.end());
        double den = 0.0;
        for (double v : sorted) den += v;
        for (int i = 0; i < out.size(); ++i) out[i] = e[size_t(i)] / den;
        return;
      }
      case Op::kMeanAll: {
        const Tensor& x = val_[size_t(nd.in[0])];
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) s += x[i];
        out[0] = s / double(x.size());
        return;
      }
      case Op::kL2: {
        const Tensor& x = val_[size_t(nd.in[0])];
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) s += x[i] * x[i];
        out[0] = nd.alpha * s;
        return;
      }
    }
  }

  void push_grad(int id) {
    const Node& nd = g_->node(id);
    const Tensor& go = grad_[size_t(id)];
    switch (nd.op) {
      case Op::kInput:
      case Op::kParam:
      case Op::kConst:
        return;
      case Op::kConvRow: {
        const Tensor& x = val_[size_t(nd.in[0])];
        const Tensor& w = val_[size_t(nd.in[1])];
        Tensor& gx = grad_[size_t(nd.in[0])];
        Tensor& gw = grad_[size_t(nd.in[1])];
        Tensor& gb = grad_[size_t(nd.in[2])];
        int co = w.dim(0), ci = w.dim(1), k = w.dim(2);
        int m = x.dim(1), to = go.dim(2);
        for (int o = 0; o < co; ++o)
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < to; ++j) {
              double g = go.at3(o, i, j);
              gb[o] += g;
              for (int c = 0; c < ci; ++c)
                for (int d = 0; d < k; ++d) {
                  gw.at3(o, c, d) += g * x.at3(c, i, j + d);
                  gx.at3(c, i, j + d) += g * w.at3(o, c, d);
                }
            }
        return;
      }
      case Op::kMatMul: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        Tensor& ga = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        int p = a.dim(0), q = a.dim(1), r = b.dim(1);
        for (int i = 0; i < p; ++i)
          for (int t = 0; t < q; ++t) {
            double s = 0.0;
            for (int j = 0; j < r; ++j) s += go.at2(i, j) * b.at2(t, j);
            ga.at2(i, t) += s;
          }
        for (int t = 0; t < q; ++t)
          for (int j = 0; j < r; ++j) {
            double s = 0.0;
            for (int i = 0; i < p; ++i) s += a.at2(i, t) * go.at2(i, j);
            gb.at2(t, j) += s;
          }
        return;
      }
      case Op::kAddRowBias: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        int p = go.dim(0), q = go.dim(1);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) {
            gx.at2(i, j) += go.at2(i, j);
            gb[j] += go.at2(i, j);
          }
        return;
      }
      case Op::kAdd: {
        Tensor& ga = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        for (int i = 0; i < go.size(); ++i) {
          ga[i] += go[i];
          gb[i] += go[i];
        }
        return;
      }
      case Op::kMul: {
        const Tensor& a = val_[size_t(nd.in[0])];
        const Tensor& b = val_[size_t(nd.in[1])];
        Tensor& ga = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        for (int i = 0; i < go.size(); ++i) {
          ga[i] += go[i] * b[i];
          gb[i] += go[i] * a[i];
        }
        return;
      }
      case Op::kRelu: {
        const Tensor& x = val_[size_t(nd.in[0])];
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i)
          if (x[i] > 0.0) gx[i] += go[i];
        return;
      }
      case Op::kTanh: {
        const Tensor& y = val_[size_t(id)];
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i) gx[i] += go[i] * (1.0 - y[i] * y[i]);
        return;
      }
      case Op::kSigmoid: {
        const Tensor& y = val_[size_t(id)];
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i) gx[i] += go[i] * y[i] * (1.0 - y[i]);
        return;
      }
      case Op::kLog: {
        const Tensor& x = val_[size_t(nd.in[0])];
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i) gx[i] += go[i] / x[i];
        return;
      }
      case Op::kSliceCols: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        int p = go.dim(0), q = go.dim(1);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) gx.at2(i, nd.a + j) += go.at2(i, j);
        return;
      }
      case Op::kTimeSlice: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        int m = go.dim(0), f = go.dim(1);
        for (int i = 0; i < m; ++i)
          for (int c = 0; c < f; ++c) gx.at3(c, i, nd.a) += go.at2(i, c);
        return;
      }
      case Op::kConcatCols: {
        Tensor& ga = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        int p = go.dim(0), qa = ga.dim(1), qb = gb.dim(1);
        for (int i = 0; i < p; ++i) {
          for (int j = 0; j < qa; ++j) ga.at2(i, j) += go.at2(i, j);
          for (int j = 0; j < qb; ++j) gb.at2(i, j) += go.at2(i, qa + j);
        }
        return;
      }
      case Op::kConcatChan: {
        Tensor& ga = grad_[size_t(nd.in[0])];
        Tensor& gb = grad_[size_t(nd.in[1])];
        for (int i = 0; i < ga.size(); ++i) ga[i] += go[i];
        for (int i = 0; i < gb.size(); ++i) gb[i] += go[i + ga.size()];
        return;
      }
      case Op::kReshape: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i) gx[i] += go[i];
        return;
      }
      case Op::kScale: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < go.size(); ++i) gx[i] += nd.alpha * go[i];
        return;
      }
      case Op::kSoftmax: {
        const Tensor& y = val_[size_t(id)];
        Tensor& gx = grad_[size_t(nd.in[0])];
        double s = 0.0;
        for (int i = 0; i < go.size(); ++i) s += go[i] * y[i];
        for (int i = 0; i < go.size(); ++i) gx[i] += y[i] * (go[i] - s);
        return;
      }
      case Op::kMeanAll: {
        Tensor& gx = grad_[size_t(nd.in[0])];
        double g = go[0] / double(gx.size());
        for (int i = 0; i < gx.size(); ++i) gx[i] += g;
        return;
      }
      case Op::kL2: {
        const Tensor& x = val_[size_t(nd.in[0])];
        Tensor& gx = grad_[size_t(nd.in[0])];
        for (int i = 0; i < gx.size(); ++i) gx[i] += go[0] * 2.0 * nd.alpha * x[i];
        return;
      }
    }
  }

  const Graph* g_;
  std::vector<Tensor> val_;
  std::vector<Tensor> grad_;
  std::vector<char> bound_;
};

// convenience single-shot wrappers
inline Tensor forward(const Graph& g, const std::vector<std::pair<std::string, Tensor>>& inputs, int output) {
  Eval ev(g);
  for (const auto& [name, v] : inputs) ev.bind(name, v);
  ev.forward(output);
  return ev.value(output);
}

inline std::vector<Tensor> backward(const Graph& g, const std::vector<std::pair<std::string, Tensor>>& inputs,
                                    int loss) {
  Eval ev(g);
  for (const auto& [name, v] : inputs) ev.bind(name, v);
  ev.forward(loss);
  ev.backward(loss);
  std::vector<Tensor> grads;
  grads.reserve(size_t(g.param_count()));
  for (int p = 0; p < g.param_count(); ++p) grads.push_back(ev.grad(g.param_node(p)));
  return grads;
}

}  // namespace portlab::ad
