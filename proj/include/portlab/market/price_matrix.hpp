#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "portlab/ad/tensor.hpp"
#include "portlab/errors.hpp"
#include "portlab/market/store.hpp"
#include "portlab/portfolio/math.hpp"

namespace portlab::market {

// m assets x T aligned periods of close/high/low, quote-currency prices.
// fill_mask marks bars that were reconstructed rather than observed.
struct GlobalPriceMatrix {
  std::vector<std::string> assets;  // non-cash ids, row order
  std::vector<int64_t> periods;     // period_start per column, constant spacing
  int64_t period_seconds = 0;
  std::vector<double> close, high, low;  // m x T row-major
  std::vector<uint8_t> fill_mask;        // m x T

  int m() const { return int(assets.size()); }
  int T() const { return int(periods.size()); }
  double close_at(int i, int t) const { return close[size_t(i) * periods.size() + size_t(t)]; }
  double high_at(int i, int t) const { return high[size_t(i) * periods.size() + size_t(t)]; }
  double low_at(int i, int t) const { return low[size_t(i) * periods.size() + size_t(t)]; }
  bool filled_at(int i, int t) const { return fill_mask[size_t(i) * periods.size() + size_t(t)] != 0; }
};

// assets chosen by trailing volume; as_of is the backtest start so the pick
// can never see evaluation-era data
struct AssetSelection {
  std::vector<std::string> assets;
  std::vector<double> mean_volumes;
  int64_t as_of = 0;
  int window_days = 0;
};

inline AssetSelection select_assets(const CandleStore& store, int count, int window_days, int64_t as_of,
                                    int64_t period_seconds) {
  if (count <= 0) throw validation_error("select_assets: count must be positive");
  auto all = store.assets();
  if (int(all.size()) < count)
    throw validation_error("select_assets: need " + std::to_string(count) + " assets, store has " +
                           std::to_string(all.size()));
  struct Ranked {
    std::string id;
    double vol;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(all.size());
  for (auto& id : all)
    ranked.push_back({id, store.mean_quote_volume(id, as_of, window_days, period_seconds)});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.vol != b.vol) return a.vol > b.vol;
    return a.id < b.id;  // deterministic tie-break
  });
  AssetSelection sel;
  sel.as_of = as_of;
  sel.window_days = window_days;
  for (int i = 0; i < count; ++i) {
    sel.assets.push_back(ranked[size_t(i)].id);
    sel.mean_volumes.push_back(ranked[size_t(i)].vol);
  }
  return sel;
}

// aligned matrix over the period grid start, start+P, ..., < end.
// missing bars forward-fill the last close (volumes are irrelevant here);
// bars missing at the head back-fill from the first observed close.
inline GlobalPriceMatrix build_global_matrix(const CandleStore& store,
                                             const std::vector<std::string>& assets,
                                             int64_t period_seconds, int64_t start, int64_t end) {
  if (period_seconds <= 0) throw validation_error("build_global_matrix: period must be positive");
  if (end <= start) throw validation_error("build_global_matrix: empty time range");
  if (assets.empty()) throw validation_error("build_global_matrix: no assets");

  GlobalPriceMatrix mat;
  mat.assets = assets;
  mat.period_seconds = period_seconds;
  for (int64_t ts = start; ts < end; ts += period_seconds) mat.periods.push_back(ts);
  const size_t T = mat.periods.size();
  const size_t m = assets.size();
  mat.close.assign(m * T, 0.0);
  mat.high.assign(m * T, 0.0);
  mat.low.assign(m * T, 0.0);
  mat.fill_mask.assign(m * T, 0);

  for (size_t i = 0; i < m; ++i) {
    auto rows = store.range(assets[i], start, end);
    if (rows.empty())
      throw validation_error("build_global_matrix: asset '" + assets[i] + "' has no bars in range");
    size_t r = 0;
    double last_close = -1.0;
    std::vector<size_t> leading;
    for (size_t t = 0; t < T; ++t) {
      while (r < rows.size() && rows[r].period_start < mat.periods[t]) ++r;
      size_t idx = i * T + t;
      if (r < rows.size() && rows[r].period_start == mat.periods[t]) {
        mat.close[idx] = rows[r].close;
        mat.high[idx] = rows[r].high;
        mat.low[idx] = rows[r].low;
        last_close = rows[r].close;
        ++r;
      } else if (last_close > 0.0) {
        mat.close[idx] = last_close;
        mat.high[idx] = last_close;
        mat.low[idx] = last_close;
        mat.fill_mask[idx] = 1;
      } else {
        leading.push_back(idx);  // resolved once the first bar appears
        mat.fill_mask[idx] = 1;
      }
    }
    if (!leading.empty()) {
      double first_close = -1.0;
      for (size_t t = 0; t < T; ++t)
        if (!mat.fill_mask[i * T + t]) {
          first_close = mat.close[i * T + t];
          break;
        }
      if (first_close <= 0.0)
        throw validation_error("build_global_matrix: asset '" + assets[i] + "' has no observed bars");
      for (size_t idx : leading) {
        mat.close[idx] = first_close;
        mat.high[idx] = first_close;
        mat.low[idx] = first_close;
      }
    }
  }
  return mat;
}

// contiguous sub-span [t0, t1) as a standalone matrix
inline GlobalPriceMatrix slice_periods(const GlobalPriceMatrix& mat, int t0, int t1) {
  if (t0 < 0 || t1 > mat.T() || t0 >= t1)
    throw range_error("slice_periods: span [" + std::to_string(t0) + "," + std::to_string(t1) +
                      ") outside the matrix");
  GlobalPriceMatrix out;
  out.assets = mat.assets;
  out.period_seconds = mat.period_seconds;
  out.periods.assign(mat.periods.begin() + t0, mat.periods.begin() + t1);
  const long T = long(mat.periods.size());
  for (long i = 0; i < long(mat.assets.size()); ++i) {
    out.close.insert(out.close.end(), mat.close.begin() + i * T + t0, mat.close.begin() + i * T + t1);
    out.high.insert(out.high.end(), mat.high.begin() + i * T + t0, mat.high.begin() + i * T + t1);
    out.low.insert(out.low.end(), mat.low.begin() + i * T + t0, mat.low.begin() + i * T + t1);
    out.fill_mask.insert(out.fill_mask.end(), mat.fill_mask.begin() + i * T + t0,
                         mat.fill_mask.begin() + i * T + t1);
  }
  return out;
}

// y_t over m+1 slots, cash first: y_0 = 1, y_i = close_t / close_{t-1}
inline portfolio::Weights relative_price(const GlobalPriceMatrix& mat, int t) {
  if (t < 1 || t >= mat.T()) throw range_error("relative_price: period index out of range");
  portfolio::Weights y(size_t(mat.m()) + 1, 1.0);
  for (int i = 0; i < mat.m(); ++i) y[size_t(i) + 1] = mat.close_at(i, t) / mat.close_at(i, t - 1);
  return y;
}

// (3, m, n) input tensor at decision time t: close/high/low planes over the
// trailing n periods, each normalized by the latest close of its asset
inline ad::Tensor price_tensor(const GlobalPriceMatrix& mat, int t, int n) {
  if (n < 1) throw validation_error("price_tensor: window must be positive");
  if (t < n - 1 || t >= mat.T())
    throw range_error("price_tensor: window [" + std::to_string(t - n + 1) + "," + std::to_string(t) +
                      "] outside the matrix");
  ad::Tensor x({3, mat.m(), n});
  for (int i = 0; i < mat.m(); ++i) {
    const double ref = mat.close_at(i, t);
    for (int j = 0; j < n; ++j) {
      int tj = t - n + 1 + j;
      x.at3(0, i, j) = mat.close_at(i, tj) / ref;
      x.at3(1, i, j) = mat.high_at(i, tj) / ref;
      x.at3(2, i, j) = mat.low_at(i, tj) / ref;
    }
  }
  return x;
}

// strategy-facing window: everything at or before t_limit is visible, later
// periods are unreachable. max_touched records the deepest access for tests.
class MarketView {
 public:
  MarketView(const GlobalPriceMatrix& mat, int t_limit) : mat_(&mat), t_limit_(t_limit) {
    if (t_limit < 0 || t_limit >= mat.T()) throw range_error("MarketView: t_limit outside the matrix");
  }

  const GlobalPriceMatrix& matrix() const { return *mat_; }
  int t_limit() const { return t_limit_; }
  int assets() const { return mat_->m(); }
  int64_t timestamp(int t) const {
    touch(t);
    return mat_->periods[size_t(t)];
  }

  ad::Tensor price_tensor(int t, int n) const {
    touch(t);
    return market::price_tensor(*mat_, t, n);
  }

  portfolio::Weights relative(int t) const {
    touch(t);
    return relative_price(*mat_, t);
  }

  double close(int i, int t) const {
    touch(t);
    return mat_->close_at(i, t);
  }

  int max_touched() const { return max_touched_; }

 private:
  void touch(int t) const {
    if (t < 0) throw range_error("MarketView: negative period index");
    if (t > t_limit_)
      throw range_error("MarketView: period " + std::to_string(t) + " is beyond the visible horizon " +
                        std::to_string(t_limit_));
    if (t > max_touched_) max_touched_ = t;
  }

  const GlobalPriceMatrix* mat_;
  int t_limit_;
  mutable int max_touched_ = -1;
};

}  // namespace portlab::market
