#pragma once

#include "portlab/ad/graph.hpp"

namespace portlab::ad {

// basic recurrent cell: h = tanh(x Wx + h_prev Wh + b)
// x (M,F), Wx (F,H), Wh (H,H), b (H) -> h (M,H)
inline int rnn_cell(Graph& g, int x, int h_prev, int wx, int wh, int b) {
  return g.tanh_(g.add_row_bias(g.add(g.matmul(x, wx), g.matmul(h_prev, wh)), b));
}

struct LstmOut {
  int h;
  int c;
};

// gate order in the packed matrices is (input, forget, candidate, output).
// x (M,F), Wx (F,4H), Wh (H,4H), b (4H) -> h,c (M,H)
inline LstmOut lstm_cell(Graph& g, int x, int h_prev, int c_prev, int wx, int wh, int b, int hidden) {
  int z = g.add_row_bias(g.add(g.matmul(x, wx), g.matmul(h_prev, wh)), b);
  int gi = g.sigmoid(g.slice_cols(z, 0, hidden));
  int gf = g.sigmoid(g.slice_cols(z, hidden, 2 * hidden));
  int gc = g.tanh_(g.slice_cols(z, 2 * hidden, 3 * hidden));
  int go = g.sigmoid(g.slice_cols(z, 3 * hidden, 4 * hidden));
  int c = g.add(g.mul(gf, c_prev), g.mul(gi, gc));
  int h = g.mul(go, g.tanh_(c));
  return {h, c};
}

}  // namespace portlab::ad
