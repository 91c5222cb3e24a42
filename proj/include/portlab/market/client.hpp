#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "portlab/errors.hpp"
#include "portlab/market/candle.hpp"
#include "portlab/market/candle_csv.hpp"
#include "portlab/util.hpp"

namespace portlab::market {

// pulls chart data from an exchange-style HTTP endpoint:
//   GET {base}/chart?asset=A&start=S&end=E&period=P
// answering a JSON array of {date, open, high, low, close, volume, quoteVolume}.
class ExchangeClient {
 public:
  explicit ExchangeClient(std::string base_url, int attempts = 3)
      : base_(std::move(base_url)), attempts_(attempts) {
    if (base_.rfind("https://", 0) == 0)
      throw io_error("https endpoints are not supported by this build");
    if (base_.rfind("http://", 0) != 0) throw io_error("exchange url must start with http://");
  }

  std::vector<Candle> fetch(const std::string& asset, int64_t start, int64_t end,
                            int64_t period_seconds) const {
    std::string path = "/chart?asset=" + asset + "&start=" + std::to_string(start) +
                       "&end=" + std::to_string(end) + "&period=" + std::to_string(period_seconds);
    std::string body;
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < attempts_; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
      httplib::Client cli(base_);
      cli.set_connection_timeout(5, 0);
      cli.set_read_timeout(15, 0);
      auto res = cli.Get(path);
      if (!res) {
        last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status >= 500) {
        last_error = "server error " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw io_error("exchange rejected " + path + " with status " + std::to_string(res->status));
      body = res->body;
      return parse_chart(body, asset, start, end);
    }
    throw network_error("exchange unreachable after " + std::to_string(attempts_) +
                        " attempts: " + last_error);
  }

 private:
  static std::vector<Candle> parse_chart(const std::string& body, const std::string& asset,
                                         int64_t start, int64_t end) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("bad chart payload: ") + e.what());
    }
    if (!doc.is_array()) throw parse_error("chart payload is not an array");
    std::map<int64_t, Candle> dedup;
    for (const auto& row : doc) {
      if (!row.is_object()) throw parse_error("chart row is not an object");
      Candle c;
      c.asset = asset;
      try {
        c.period_start = row.at("date").get<int64_t>();
        c.open = row.at("open").get<double>();
        c.high = row.at("high").get<double>();
        c.low = row.at("low").get<double>();
        c.close = row.at("close").get<double>();
        c.base_volume = row.at("volume").get<double>();
        c.quote_volume = row.at("quoteVolume").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("chart row missing field: ") + e.what());
      }
      c.validate();
      if (c.period_start < start || c.period_start >= end) continue;
      dedup[c.period_start] = std::move(c);  // later rows win
    }
    std::vector<Candle> out;
    out.reserve(dedup.size());
    for (auto& [ts, c] : dedup) out.push_back(std::move(c));
    return out;
  }

  std::string base_;
  int attempts_;
};

// unified entry: http sources hit the exchange endpoint, anything else is
// treated as a candle CSV file on disk. results are time-ordered and deduped.
inline std::vector<Candle> fetch_candles(const std::string& source, const std::string& asset,
                                         int64_t start, int64_t end, int64_t period_seconds) {
  if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) {
    ExchangeClient client(source);
    return client.fetch(asset, start, end, period_seconds);
  }
  auto rows = candles_from_csv(read_text_file(source));
  std::vector<Candle> out;
  for (auto& c : rows)
    if (c.asset == asset && c.period_start >= start && c.period_start < end)
      out.push_back(std::move(c));
  return out;
}

}  // namespace portlab::market
