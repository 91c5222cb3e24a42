#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/market/candle.hpp"
#include "portlab/util.hpp"

namespace portlab::market {

inline constexpr const char* kCandleCsvHeader =
    "period_start,asset,open,high,low,close,base_volume,quote_volume";

// shortest-round-trip float formatting, so export -> import is bit-identical
inline std::string candles_to_csv(const std::vector<Candle>& candles) {
  std::string out = kCandleCsvHeader;
  out += '\n';
  for (const auto& c : candles) {
    out += std::to_string(c.period_start);
    out += ',';
    out += c.asset;
    out += ',';
    out += format_double(c.open);
    out += ',';
    out += format_double(c.high);
    out += ',';
    out += format_double(c.low);
    out += ',';
    out += format_double(c.close);
    out += ',';
    out += format_double(c.base_volume);
    out += ',';
    out += format_double(c.quote_volume);
    out += '\n';
  }
  return out;
}

// duplicate (asset, period_start) rows: the later row wins.
// any structural problem names the 1-based line number.
inline std::vector<Candle> candles_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<Candle> rows;
  std::map<std::pair<std::string, int64_t>, size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != kCandleCsvHeader)
        throw parse_error("line 1: expected header '" + std::string(kCandleCsvHeader) + "'");
      continue;
    }
    auto cols = split(line, ',');
    if (cols.size() != 8)
      throw parse_error("line " + std::to_string(lineno) + ": expected 8 columns, got " +
                        std::to_string(cols.size()));
    const std::string where = "line " + std::to_string(lineno);
    Candle c;
    c.period_start = parse_i64(cols[0], where);
    c.asset = std::string(cols[1]);
    c.open = parse_double(cols[2], where);
    c.high = parse_double(cols[3], where);
    c.low = parse_double(cols[4], where);
    c.close = parse_double(cols[5], where);
    c.base_volume = parse_double(cols[6], where);
    c.quote_volume = parse_double(cols[7], where);
    try {
      c.validate();
    } catch (const validation_error& e) {
      throw parse_error(where + ": " + e.what());
    }
    auto key = std::make_pair(c.asset, c.period_start);
    auto it = seen.find(key);
    if (it != seen.end())
      rows[it->second] = std::move(c);
    else {
      seen.emplace(std::move(key), rows.size());
      rows.push_back(std::move(c));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Candle& a, const Candle& b) {
    if (a.asset != b.asset) return a.asset < b.asset;
    return a.period_start < b.period_start;
  });
  return rows;
}

}  // namespace portlab::market
