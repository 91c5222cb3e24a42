#pragma once

#include <cstdint>
#include <string>

#include "portlab/errors.hpp"

namespace portlab::market {

// one OHLCV bar; period_start is unix seconds at the bar's opening edge.
// prices are in quote-currency units, base_volume in the asset's own units.
struct Candle {
  int64_t period_start = 0;
  std::string asset;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double base_volume = 0.0;
  double quote_volume = 0.0;

  void validate() const {
    if (asset.empty()) throw validation_error("candle: empty asset id");
    if (!(open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0))
      throw validation_error("candle " + asset + "@" + std::to_string(period_start) +
                             ": prices must be positive");
    if (high < low)
      throw validation_error("candle " + asset + "@" + std::to_string(period_start) + ": high below low");
    if (open > high || open < low || close > high || close < low)
      throw validation_error("candle " + asset + "@" + std::to_string(period_start) +
                             ": open/close outside [low, high]");
    if (base_volume < 0.0 || quote_volume < 0.0)
      throw validation_error("candle " + asset + "@" + std::to_string(period_start) +
                             ": negative volume");
  }
};

}  // namespace portlab::market
