#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/market/candle.hpp"
#include "portlab/market/price_matrix.hpp"

namespace portlab::market {

// log-price path: drift + Brownian noise, optionally modulated by a sinusoid.
// amplitude < 1 keeps prices positive.
struct SyntheticAssetSpec {
  std::string id;
  double base_price = 1.0;
  double drift = 0.0;             // per-period log drift
  double volatility = 0.0;        // per-period log-return standard deviation
  double season_amplitude = 0.0;  // price = gbm * (1 + A sin(2 pi t / P + phase))
  double season_period = 0.0;     // in periods; required when amplitude != 0
  double season_phase = 0.0;
  double volume_scale = 1000.0;

  void validate() const {
    if (id.empty()) throw validation_error("synthetic asset: empty id");
    if (!(base_price > 0.0)) throw validation_error("synthetic asset " + id + ": base price must be positive");
    if (volatility < 0.0) throw validation_error("synthetic asset " + id + ": negative volatility");
    if (std::abs(season_amplitude) >= 1.0)
      throw validation_error("synthetic asset " + id + ": |amplitude| must be below 1");
    if (season_amplitude != 0.0 && !(season_period > 0.0))
      throw validation_error("synthetic asset " + id + ": seasonal period must be positive");
    if (!(volume_scale > 0.0)) throw validation_error("synthetic asset " + id + ": volume scale must be positive");
  }
};

struct SyntheticMarketSpec {
  std::vector<SyntheticAssetSpec> assets;
  int64_t start_time = 0;
  int64_t period_seconds = 1800;
  int periods = 0;
  uint64_t seed = 0;

  void validate() const {
    if (assets.empty()) throw validation_error("synthetic market: no assets");
    if (period_seconds <= 0) throw validation_error("synthetic market: period must be positive");
    if (periods <= 0) throw validation_error("synthetic market: period count must be positive");
    for (const auto& a : assets) a.validate();
  }
};

// same spec and seed always produce the same bars. each asset consumes its own
// rng stream so adding an asset does not disturb the others.
inline std::vector<Candle> generate_synthetic_candles(const SyntheticMarketSpec& spec) {
  spec.validate();
  std::vector<Candle> out;
  out.reserve(size_t(spec.periods) * spec.assets.size());
  for (size_t a = 0; a < spec.assets.size(); ++a) {
    const auto& as = spec.assets[a];
    std::mt19937_64 rng(spec.seed * 1000003ull + a);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> wick(0.0, 0.004);
    std::uniform_real_distribution<double> vol_noise(0.7, 1.3);
    double log_gbm = 0.0;
    double prev_close = 0.0;
    for (int t = 0; t < spec.periods; ++t) {
      if (t > 0) log_gbm += as.drift + as.volatility * noise(rng);
      double season = 1.0;
      if (as.season_amplitude != 0.0)
        season += as.season_amplitude *
                  std::sin(2.0 * 3.141592653589793 * double(t) / as.season_period + as.season_phase);
      double close = as.base_price * std::exp(log_gbm) * season;
      double open = t == 0 ? close : prev_close;
      double hi = std::max(open, close) * (1.0 + wick(rng));
      double lo = std::min(open, close) * (1.0 - wick(rng));
      Candle c;
      c.asset = as.id;
      c.period_start = spec.start_time + int64_t(t) * spec.period_seconds;
      c.open = open;
      c.high = hi;
      c.low = lo;
      c.close = close;
      c.quote_volume = as.volume_scale * vol_noise(rng);
      c.base_volume = c.quote_volume / close;
      c.validate();
      out.push_back(std::move(c));
      prev_close = close;
    }
  }
  return out;
}

// matrix variant for tests and fixtures that skip the store round trip
inline GlobalPriceMatrix generate_synthetic_market(const SyntheticMarketSpec& spec) {
  auto candles = generate_synthetic_candles(spec);
  GlobalPriceMatrix mat;
  mat.period_seconds = spec.period_seconds;
  for (const auto& a : spec.assets) mat.assets.push_back(a.id);
  for (int t = 0; t < spec.periods; ++t)
    mat.periods.push_back(spec.start_time + int64_t(t) * spec.period_seconds);
  const size_t T = size_t(spec.periods);
  const size_t m = spec.assets.size();
  mat.close.assign(m * T, 0.0);
  mat.high.assign(m * T, 0.0);
  mat.low.assign(m * T, 0.0);
  mat.fill_mask.assign(m * T, 0);
  for (size_t a = 0; a < m; ++a)
    for (size_t t = 0; t < T; ++t) {
      const Candle& c = candles[a * T + t];
      mat.close[a * T + t] = c.close;
      mat.high[a * T + t] = c.high;
      mat.low[a * T + t] = c.low;
    }
  return mat;
}

}  // namespace portlab::market
