#pragma once

#include <sqlite3.h>

#include <cstdint>
#include <string>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/market/candle.hpp"

namespace portlab::market {

// embedded single-file candle store keyed by (asset, period_start).
// one writer at a time; any number of concurrent readers.
class CandleStore {
 public:
  explicit CandleStore(const std::string& path) {
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
      std::string why = db_ ? sqlite3_errmsg(db_) : "out of memory";
      if (db_) sqlite3_close(db_);
      throw io_error("cannot open store '" + path + "': " + why);
    }
    exec(
        "CREATE TABLE IF NOT EXISTS candles("
        " asset TEXT NOT NULL,"
        " period_start INTEGER NOT NULL,"
        " open REAL NOT NULL, high REAL NOT NULL, low REAL NOT NULL, close REAL NOT NULL,"
        " base_volume REAL NOT NULL, quote_volume REAL NOT NULL,"
        " PRIMARY KEY(asset, period_start))");
  }

  CandleStore(const CandleStore&) = delete;
  CandleStore& operator=(const CandleStore&) = delete;
  CandleStore(CandleStore&& o) noexcept : db_(o.db_) { o.db_ = nullptr; }

  ~CandleStore() {
    if (db_) sqlite3_close(db_);
  }

  void upsert(const std::vector<Candle>& candles) {
    for (const auto& c : candles) c.validate();
    exec("BEGIN");
    sqlite3_stmt* st = prepare(
        "INSERT OR REPLACE INTO candles"
        " (asset, period_start, open, high, low, close, base_volume, quote_volume)"
        " VALUES (?,?,?,?,?,?,?,?)");
    for (const auto& c : candles) {
      sqlite3_bind_text(st, 1, c.asset.c_str(), -1, SQLITE_TRANSIENT);
      sqlite3_bind_int64(st, 2, c.period_start);
      sqlite3_bind_double(st, 3, c.open);
      sqlite3_bind_double(st, 4, c.high);
      sqlite3_bind_double(st, 5, c.low);
      sqlite3_bind_double(st, 6, c.close);
      sqlite3_bind_double(st, 7, c.base_volume);
      sqlite3_bind_double(st, 8, c.quote_volume);
      if (sqlite3_step(st) != SQLITE_DONE) {
        std::string why = sqlite3_errmsg(db_);
        sqlite3_finalize(st);
        exec("ROLLBACK");
        throw io_error("store upsert failed: " + why);
      }
      sqlite3_reset(st);
    }
    sqlite3_finalize(st);
    exec("COMMIT");
  }

  // bars with period_start in [start, end), ordered by time
  std::vector<Candle> range(const std::string& asset, int64_t start, int64_t end) const {
    sqlite3_stmt* st = prepare(
        "SELECT period_start, open, high, low, close, base_volume, quote_volume"
        " FROM candles WHERE asset=? AND period_start>=? AND period_start<?"
        " ORDER BY period_start");
    sqlite3_bind_text(st, 1, asset.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_int64(st, 2, start);
    sqlite3_bind_int64(st, 3, end);
    std::vector<Candle> out;
    while (sqlite3_step(st) == SQLITE_ROW) {
      Candle c;
      c.asset = asset;
      c.period_start = sqlite3_column_int64(st, 0);
      c.open = sqlite3_column_double(st, 1);
      c.high = sqlite3_column_double(st, 2);
      c.low = sqlite3_column_double(st, 3);
      c.close = sqlite3_column_double(st, 4);
      c.base_volume = sqlite3_column_double(st, 5);
      c.quote_volume = sqlite3_column_double(st, 6);
      out.push_back(std::move(c));
    }
    sqlite3_finalize(st);
    return out;
  }

  std::vector<std::string> assets() const {
    sqlite3_stmt* st = prepare("SELECT DISTINCT asset FROM candles ORDER BY asset");
    std::vector<std::string> out;
    while (sqlite3_step(st) == SQLITE_ROW)
      out.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(st, 0)));
    sqlite3_finalize(st);
    return out;
  }

  int64_t count() const {
    sqlite3_stmt* st = prepare("SELECT COUNT(*) FROM candles");
    int64_t n = 0;
    if (sqlite3_step(st) == SQLITE_ROW) n = sqlite3_column_int64(st, 0);
    sqlite3_finalize(st);
    return n;
  }

  // mean quote volume per period over [as_of - days*86400, as_of);
  // periods with no bar count as zero volume
  double mean_quote_volume(const std::string& asset, int64_t as_of, int days,
                           int64_t period_seconds) const {
    if (days <= 0 || period_seconds <= 0)
      throw validation_error("mean_quote_volume: window and period must be positive");
    int64_t start = as_of - int64_t(days) * 86400;
    sqlite3_stmt* st = prepare(
        "SELECT COALESCE(SUM(quote_volume), 0) FROM candles"
        " WHERE asset=? AND period_start>=? AND period_start<?");
    sqlite3_bind_text(st, 1, asset.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_int64(st, 2, start);
    sqlite3_bind_int64(st, 3, as_of);
    double sum = 0.0;
    if (sqlite3_step(st) == SQLITE_ROW) sum = sqlite3_column_double(st, 0);
    sqlite3_finalize(st);
    double expected = double(int64_t(days) * 86400 / period_seconds);
    return sum / expected;
  }

 private:
  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string why = err ? err : "unknown";
      sqlite3_free(err);
      throw io_error(std::string("store exec failed: ") + why);
    }
  }

  sqlite3_stmt* prepare(const char* sql) const {
    sqlite3_stmt* st = nullptr;
    if (sqlite3_prepare_v2(db_, sql, -1, &st, nullptr) != SQLITE_OK)
      throw io_error(std::string("store prepare failed: ") + sqlite3_errmsg(db_));
    return st;
  }

  sqlite3* db_ = nullptr;
};

}  // namespace portlab::market
