#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/portfolio/math.hpp"
#include "portlab/util.hpp"

namespace portlab::backtest {

// one completed step: the decision made at some period t and its outcome
// once the move into t+1 is known. timestamp is the period the return
// lands on (t+1), so calendar bucketing assigns a return to the moment
// it was realized.
struct BacktestRecord {
  int64_t timestamp = 0;
  portfolio::Weights w_target;   // weights after the trade
  portfolio::Weights w_evolved;  // pre-trade holdings: last target drifted by y_t
  double mu = 1.0;               // transaction remainder of the trade
  double rho = 0.0;              // rate of return, mu*(y.w) - 1
  double r = 0.0;                // log return, ln(1 + rho)
  double p = 1.0;                // cumulative value, starting from 1
};

// timestamp, w0.., ew0.., mu, rho, r, p — doubles in shortest
// round-trip form so a reload reproduces the run bit for bit
inline std::string records_to_csv(const std::vector<BacktestRecord>& records) {
  std::string out = "timestamp";
  const size_t slots = records.empty() ? 0 : records.front().w_target.size();
  for (size_t i = 0; i < slots; ++i) out += ",w" + std::to_string(i);
  for (size_t i = 0; i < slots; ++i) out += ",ew" + std::to_string(i);
  out += ",mu,rho,r,p\n";
  for (const auto& rec : records) {
    out += std::to_string(rec.timestamp);
    for (double w : rec.w_target) out += "," + format_double(w);
    for (double w : rec.w_evolved) out += "," + format_double(w);
    out += "," + format_double(rec.mu);
    out += "," + format_double(rec.rho);
    out += "," + format_double(rec.r);
    out += "," + format_double(rec.p);
    out += "\n";
  }
  return out;
}

inline std::vector<BacktestRecord> records_from_csv(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(what + ": empty record file");
  auto header = split(line, ',');
  size_t slots = 0;
  while (1 + slots < header.size() && header[1 + slots][0] == 'w') ++slots;
  if (header.size() != 1 + 2 * slots + 4 || header[0] != "timestamp" || header.back() != "p")
    throw parse_error(what + ": unrecognized record header '" + line + "'");

  std::vector<BacktestRecord> out;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line, ',');
    const std::string at = what + " line " + std::to_string(lineno);
    if (f.size() != header.size())
      throw parse_error(at + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(f.size()));
    BacktestRecord rec;
    rec.timestamp = parse_i64(f[0], at);
    size_t k = 1;
    for (size_t i = 0; i < slots; ++i) rec.w_target.push_back(parse_double(f[k++], at));
    for (size_t i = 0; i < slots; ++i) rec.w_evolved.push_back(parse_double(f[k++], at));
    rec.mu = parse_double(f[k++], at);
    rec.rho = parse_double(f[k++], at);
    rec.r = parse_double(f[k++], at);
    rec.p = parse_double(f[k++], at);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace portlab::backtest
