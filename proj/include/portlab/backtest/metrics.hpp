#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "portlab/backtest/records.hpp"
#include "portlab/dates.hpp"
#include "portlab/errors.hpp"

namespace portlab::backtest {

// final accumulated value with initial value 1
inline double compute_fapv(const std::vector<BacktestRecord>& records) {
  if (records.empty()) throw validation_error("fAPV: no records");
  double p = 1.0;
  for (const auto& rec : records) p *= 1.0 + rec.rho;
  return p;
}

// per-period risk-adjusted mean return: mean over population std of the
// excess rate-of-return series. unannualized.
inline double compute_sharpe(const std::vector<BacktestRecord>& records, double risk_free = 0.0) {
  if (records.size() < 2) throw validation_error("Sharpe: need at least two periods");
  double mean = 0.0;
  for (const auto& rec : records) mean += rec.rho - risk_free;
  mean /= double(records.size());
  double var = 0.0;
  for (const auto& rec : records) {
    double d = rec.rho - risk_free - mean;
    var += d * d;
  }
  var /= double(records.size());
  if (var == 0.0) throw numerical_error("Sharpe: zero return variance, ratio undefined");
  return mean / std::sqrt(var);
}

// largest peak-to-trough loss of the recorded value series, one pass
inline double compute_mdd(const std::vector<BacktestRecord>& records) {
  if (records.empty()) throw validation_error("drawdown: no records");
  double peak = 0.0, worst = 0.0;
  for (const auto& rec : records) {
    if (rec.p > peak) peak = rec.p;
    double dd = (peak - rec.p) / peak;
    if (dd > worst) worst = dd;
  }
  return worst;
}

enum class Bucket { period, day, week };

struct SignCounts {
  int64_t negatives = 0;
  int64_t positives = 0;
};

// aggregate log returns per period / UTC day / ISO week; the sign of the
// bucket sum decides the count, an exactly-zero bucket counts positive
inline SignCounts count_signed_buckets(const std::vector<BacktestRecord>& records, Bucket bucket) {
  SignCounts counts;
  if (bucket == Bucket::period) {
    for (const auto& rec : records) (rec.r < 0.0 ? counts.negatives : counts.positives)++;
    return counts;
  }
  std::map<std::pair<int64_t, int64_t>, double> sums;
  for (const auto& rec : records) {
    std::pair<int64_t, int64_t> key;
    if (bucket == Bucket::day) {
      key = {utc_day_index(rec.timestamp), 0};
    } else {
      auto [year, week] = iso_week(rec.timestamp);
      key = {year, week};
    }
    sums[key] += rec.r;
  }
  for (const auto& [key, sum] : sums) (sum < 0.0 ? counts.negatives : counts.positives)++;
  return counts;
}

struct PerformanceReport {
  double fapv = 1.0;
  double sharpe = 0.0;
  bool sharpe_defined = false;  // false when the return variance vanishes
  double mdd = 0.0;
  SignCounts periods, days, weeks;
};

inline PerformanceReport summarize(const std::vector<BacktestRecord>& records, double risk_free = 0.0) {
  PerformanceReport rep;
  rep.fapv = compute_fapv(records);
  rep.mdd = compute_mdd(records);
  try {
    rep.sharpe = compute_sharpe(records, risk_free);
    rep.sharpe_defined = true;
  } catch (const std::runtime_error&) {
    rep.sharpe = 0.0;
    rep.sharpe_defined = false;
  }
  rep.periods = count_signed_buckets(records, Bucket::period);
  rep.days = count_signed_buckets(records, Bucket::day);
  rep.weeks = count_signed_buckets(records, Bucket::week);
  return rep;
}

}  // namespace portlab::backtest
