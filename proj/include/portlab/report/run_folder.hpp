#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "portlab/backtest/backtester.hpp"
#include "portlab/backtest/records.hpp"
#include "portlab/market/candle_csv.hpp"
#include "portlab/market/client.hpp"
#include "portlab/market/store.hpp"
#include "portlab/market/synthetic.hpp"
#include "portlab/policy/network.hpp"
#include "portlab/report/net_config.hpp"
#include "portlab/train/trainer.hpp"

namespace portlab::report {

// fixed on-disk layout rooted at the working directory: the master config
// beside a train_package/ of numbered run folders and a candle database
struct Workspace {
  std::string root = ".";

  std::string config_path() const { return root + "/net_config.json"; }
  std::string package_dir() const { return root + "/train_package"; }
  std::string folder(int index) const { return package_dir() + "/" + std::to_string(index); }
  std::string database_dir() const { return root + "/database"; }
  std::string database_path() const { return database_dir() + "/data.db"; }
  std::string backtests_dir() const { return package_dir() + "/backtests"; }
  std::string summary_path() const { return package_dir() + "/train_summary.csv"; }
};

// the held-out span and the region training may learn from. reversed
// puts the test portion at the chronological start instead of the end.
struct Split {
  int test_start = 0;
  int test_end = 0;  // exclusive
  bool reversed = false;
};

inline Split split_periods(const NetConfig& cfg, int T) {
  const int n = cfg.input.window_size;
  const int need_train = n + cfg.training.batch_size;  // one windowed batch
  int n_test = int(std::lround(double(T) * cfg.input.test_portion));
  if (n_test < 2) n_test = 2;
  if (T - n_test < need_train)
    throw config_error("net_config: only " + std::to_string(T) + " periods between start_date and "
                       "end_date; the training span needs window_size + batch_size = " +
                       std::to_string(need_train) + " beyond the test portion");
  Split s;
  s.reversed = cfg.input.portion_reversed;
  if (!s.reversed) {
    s.test_start = T - n_test;
    s.test_end = T;
  } else {
    if (n_test < n + 1)
      throw config_error("net_config: reversed test portion of " + std::to_string(n_test) +
                         " periods is shorter than one input window plus a return");
    s.test_start = n - 1;  // earliest period with a full window behind it
    s.test_end = n_test;
  }
  return s;
}

inline int64_t period_count(const NetConfig& cfg) {
  return (cfg.input.end_epoch() - cfg.input.start_epoch()) / cfg.input.global_period;
}

// make the candle store cover the configured range, pulling bars from the
// configured source when they are missing. idempotent once populated.
inline void ensure_database(const Workspace& ws, const NetConfig& cfg, std::ostream* log = nullptr) {
  const DataSourceSection& ds = cfg.data_source;
  if (ds.kind.empty())
    throw config_error("net_config: a data_source section is required to locate market data");
  std::filesystem::create_directories(ws.database_dir());
  market::CandleStore store(ws.database_path());
  const int64_t start = cfg.input.start_epoch();
  const int64_t end = cfg.input.end_epoch();
  const int64_t period = cfg.input.global_period;
  const int T = int((end - start) / period);

  if (ds.kind == "synthetic") {
    if (store.count() >= int64_t(ds.synthetic_assets.size()) * T) return;
    market::SyntheticMarketSpec spec;
    spec.assets = ds.synthetic_assets;
    spec.start_time = start;
    spec.period_seconds = period;
    spec.periods = T;
    spec.seed = ds.seed;
    auto candles = market::generate_synthetic_candles(spec);
    store.upsert(candles);
    if (log) *log << "generated " << candles.size() << " synthetic candles\n";
  } else if (ds.kind == "csv") {
    std::string path = ds.path.front() == '/' ? ds.path : ws.root + "/" + ds.path;
    auto candles = market::candles_from_csv(read_text_file(path));
    store.upsert(candles);
    if (log) *log << "imported " << candles.size() << " candles from " << path << "\n";
  } else {  // http
    if (store.count() > 0) return;  // delete the database to refresh
    for (const auto& asset : ds.assets) {
      auto candles = market::fetch_candles(ds.base_url, asset, start, end, period);
      store.upsert(candles);
      if (log) *log << "fetched " << candles.size() << " candles for " << asset << "\n";
    }
  }
}

struct LoadedMarket {
  market::GlobalPriceMatrix matrix;
  Split split;
  market::AssetSelection selection;
};

inline LoadedMarket load_market(const Workspace& ws, const NetConfig& cfg) {
  ensure_database(ws, cfg);
  const int T = int(period_count(cfg));
  LoadedMarket mk;
  mk.split = split_periods(cfg, T);
  market::CandleStore store(ws.database_path());
  // the asset pick may only see data before the backtest begins
  const int64_t as_of = cfg.input.start_epoch() + int64_t(mk.split.test_start) * cfg.input.global_period;
  mk.selection = market::select_assets(store, cfg.input.coin_number, cfg.input.volume_average_days,
                                       as_of, cfg.input.global_period);
  mk.matrix = market::build_global_matrix(store, mk.selection.assets, cfg.input.global_period,
                                          cfg.input.start_epoch(), cfg.input.end_epoch());
  return mk;
}

inline void generate_folders(const Workspace& ws, const NetConfig& cfg, int repeat, std::ostream& out) {
  if (repeat < 1) throw config_error("generate: repeat must be a positive integer");
  for (int i = 0; i < repeat; ++i) {
    std::filesystem::create_directories(ws.folder(i));
    write_text_file(ws.folder(i) + "/net_config.json", cfg.to_json().dump(2) + "\n");
    out << "created " << ws.folder(i) << " (seed " << i << ")\n";
  }
}

inline std::vector<int> list_run_folders(const Workspace& ws) {
  std::vector<int> out;
  if (!std::filesystem::is_directory(ws.package_dir())) return out;
  for (const auto& entry : std::filesystem::directory_iterator(ws.package_dir())) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos) continue;
    out.push_back(int(parse_i64(name, "run folder name")));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline train::TrainingConfig training_config_from(const NetConfig& cfg, uint64_t seed) {
  train::TrainingConfig tc;
  tc.steps = cfg.training.steps;
  tc.learning_rate = cfg.training.learning_rate;
  tc.batch_size = cfg.training.batch_size;
  tc.buffer_decay = cfg.training.buffer_biased;
  tc.fast_train = cfg.training.fast_train;
  tc.commissions = {cfg.trading.trading_consumption, cfg.trading.trading_consumption};
  tc.seed = seed;
  tc.log_every = 0;  // the run folder owns logging
  tc.rolling_steps = cfg.trading.rolling_training_steps;
  tc.rolling_learning_rate = cfg.trading.learning_rate;
  tc.rolling_buffer_decay = cfg.trading.buffer_biased;
  return tc;
}

namespace detail {

// chained all-cash replay over a span the trainer's matrix does not cover
// (the test prefix of a reversed split); mirrors the trainer's own
// evaluation arithmetic, exact remainder included
inline train::EvalStats replay_prefix(policy::PolicyNetwork& net, const market::GlobalPriceMatrix& mat,
                                      int t_start, int t_end,
                                      const portfolio::CommissionSchedule& commissions, double penalty) {
  train::EvalStats es;
  portfolio::Weights w_prev(size_t(net.m) + 1, 0.0);
  w_prev[0] = 1.0;
  double sum_log = 0.0, sum_free = 0.0;
  ad::Eval ev(net.graph);
  for (int t = t_start; t <= std::min(t_end - 2, mat.T() - 2); ++t) {
    portfolio::Weights w = policy::decide_with(net, ev, market::price_tensor(mat, t, net.n), w_prev);
    portfolio::Weights evolved =
        t == 0 ? w_prev : portfolio::evolved_weights(market::relative_price(mat, t), w_prev);
    double mu = portfolio::transaction_remainder(evolved, w, commissions);
    portfolio::Weights y_next = market::relative_price(mat, t + 1);
    double gross = 0.0;
    for (size_t i = 0; i < w.size(); ++i) gross += y_next[i] * w[i];
    es.portfolio_value *= mu * gross;
    sum_log += std::log(mu * gross);
    sum_free += std::log(gross);
    ++es.decisions;
    w_prev = std::move(w);
  }
  if (es.decisions > 0) {
    es.log_mean = sum_log / es.decisions;
    es.log_mean_free = sum_free / es.decisions;
  }
  es.loss = -es.log_mean + penalty;
  return es;
}

inline train::EvalStats eval_test(train::Trainer& trainer, policy::PolicyNetwork& net,
                                  const LoadedMarket& mk, const train::TrainingConfig& tc,
                                  bool write_rows) {
  if (!mk.split.reversed)
    return trainer.evaluate_split(mk.split.test_start, mk.split.test_end, write_rows);
  return replay_prefix(net, mk.matrix, mk.split.test_start, mk.split.test_end, tc.commissions,
                       trainer.penalty());
}

inline void append_appendix_log(std::ostream& log, int step, const train::EvalStats& es) {
  log << "step " << step << "\n"
      << "the portfolio value on test set is " << es.portfolio_value << "\n"
      << "log_mean is " << es.log_mean << "\n"
      << "loss_value is " << es.loss << "\n"
      << "log mean without commission fee is " << es.log_mean_free << "\n";
}

}  // namespace detail

struct SummaryRow {
  int index = 0;
  std::string config_hash;
  std::string network;
  uint64_t seed = 0;
  int steps = 0;
  double test_portfolio_value = 1.0;
  double test_log_mean = 0.0;
  double test_log_mean_free = 0.0;
  double test_loss = 0.0;

  static const char* header() {
    return "index,config,network,seed,steps,test_portfolio_value,test_log_mean,"
           "test_log_mean_free,test_loss";
  }

  std::string to_csv() const {
    return std::to_string(index) + "," + config_hash + "," + network + "," + std::to_string(seed) +
           "," + std::to_string(steps) + "," + format_double(test_portfolio_value) + "," +
           format_double(test_log_mean) + "," + format_double(test_log_mean_free) + "," +
           format_double(test_loss);
  }
};

// train_summary.csv holds one row per run folder; rows for retrained
// folders are replaced, others kept, output sorted by index
inline void merge_summary(const Workspace& ws, const std::vector<SummaryRow>& fresh) {
  std::vector<std::pair<int, std::string>> rows;
  if (std::filesystem::exists(ws.summary_path())) {
    std::istringstream in(read_text_file(ws.summary_path()));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = split(line, ',');
      rows.emplace_back(int(parse_i64(fields[0], "train_summary.csv index")), line);
    }
  }
  for (const auto& row : fresh) {
    std::string line = row.to_csv();
    bool replaced = false;
    for (auto& [idx, old] : rows)
      if (idx == row.index) {
        old = line;
        replaced = true;
      }
    if (!replaced) rows.emplace_back(row.index, line);
  }
  std::sort(rows.begin(), rows.end());
  std::string out = std::string(SummaryRow::header()) + "\n";
  for (const auto& [idx, line] : rows) out += line + "\n";
  write_text_file(ws.summary_path(), out);
}

// offline training for one run folder: seed = folder index, artifacts
// programlog / metrics.csv / netfile.ckpt / pvm.bin, returns its summary row
inline SummaryRow train_folder(const Workspace& ws, int index) {
  const std::string dir = ws.folder(index);
  std::vector<std::string> warnings;
  NetConfig cfg = load_net_config(dir + "/net_config.json", &warnings);
  std::ofstream programlog(dir + "/programlog", std::ios::trunc);
  if (!programlog) throw io_error("cannot write " + dir + "/programlog");
  for (const auto& w : warnings) programlog << "net_config warning: " << w << "\n";

  LoadedMarket mk = load_market(ws, cfg);
  policy::PolicyNetwork net = policy::build_network(cfg.topology, mk.matrix.m(), cfg.input.window_size,
                                                    cfg.input.feature_number, uint64_t(index));
  train::TrainingConfig tc = training_config_from(cfg, uint64_t(index));
  // the trainer only ever sees the span it may learn from
  market::GlobalPriceMatrix train_mat =
      mk.split.reversed ? market::slice_periods(mk.matrix, mk.split.test_end, mk.matrix.T()) : mk.matrix;
  train::Trainer trainer(net, train_mat, tc);
  const int train_horizon = mk.split.reversed ? train_mat.T() : mk.split.test_start;

  const int interval = tc.steps <= 0 ? 0 : std::max(1, std::min(1000, tc.steps / 5));
  std::string metrics = "step,loss,log_mean,test_portfolio_value,test_log_mean,test_log_mean_free,test_loss\n";
  for (int step = 1; step <= tc.steps; ++step) {
    train::BatchStats bs = trainer.batch_update(train_horizon - 1, tc.learning_rate);
    if (interval > 0 && step % interval == 0) {
      train::EvalStats es = detail::eval_test(trainer, net, mk, tc, false);
      detail::append_appendix_log(programlog, step, es);
      metrics += std::to_string(step) + "," + format_double(bs.loss) + "," + format_double(bs.log_mean) +
                 "," + format_double(es.portfolio_value) + "," + format_double(es.log_mean) + "," +
                 format_double(es.log_mean_free) + "," + format_double(es.loss) + "\n";
      if (cfg.training.snap_shot)
        policy::save_network(net, dir + "/netfile-" + std::to_string(step) + ".ckpt");
    }
  }
  train::EvalStats final_es = detail::eval_test(trainer, net, mk, tc, !mk.split.reversed);
  policy::save_network(net, dir + "/netfile.ckpt");
  trainer.pvm().save(dir + "/pvm.bin");
  write_text_file(dir + "/metrics.csv", metrics);
  programlog << "training complete after " << tc.steps << " steps\n";
  detail::append_appendix_log(programlog, tc.steps, final_es);

  SummaryRow row;
  row.index = index;
  row.config_hash = cfg.hash();
  row.network = policy::net_kind_name(cfg.topology.kind);
  row.seed = uint64_t(index);
  row.steps = tc.steps;
  row.test_portfolio_value = final_es.portfolio_value;
  row.test_log_mean = final_es.log_mean;
  row.test_log_mean_free = final_es.log_mean_free;
  row.test_loss = final_es.loss;
  return row;
}

// replay the held-out span with the trained agent, rolling training per
// the config, and leave backtest.csv in the run folder
inline std::vector<backtest::BacktestRecord> backtest_folder(const Workspace& ws, int index) {
  const std::string dir = ws.folder(index);
  NetConfig cfg = load_net_config(dir + "/net_config.json");
  LoadedMarket mk = load_market(ws, cfg);
  policy::PolicyNetwork net = policy::load_network(dir + "/netfile.ckpt");
  if (net.m != mk.matrix.m() || net.n != cfg.input.window_size || net.f != cfg.input.feature_number)
    throw config_error("backtest: checkpoint in " + dir + " does not match the configured market shape");

  train::TrainingConfig tc = training_config_from(cfg, uint64_t(index));
  train::Trainer trainer(net, mk.matrix, tc);
  std::ofstream programlog(dir + "/programlog", std::ios::app);

  bool online = cfg.input.online;
  if (online && mk.split.reversed) {
    online = false;  // earlier periods do not exist; updating would peek forward
    programlog << "online learning skipped: the reversed split has no prior history\n";
  }
  if (!mk.split.reversed && std::filesystem::exists(dir + "/pvm.bin")) {
    train::Pvm stored = train::Pvm::load(dir + "/pvm.bin");
    if (stored.rows() == trainer.pvm().rows() && stored.width() == trainer.pvm().width())
      trainer.pvm() = std::move(stored);
  }

  backtest::AgentStrategy agent(trainer, net);
  backtest::BacktestConfig bc;
  bc.t_start = mk.split.test_start;
  bc.t_end = mk.split.test_end;
  bc.commissions = tc.commissions;
  bc.online = online;
  auto records = backtest::run_backtest(agent, mk.matrix, bc);
  for (size_t i = 0; i < records.size(); ++i)
    programlog << "the step is " << i << "\n"
               << "total assets are " << records[i].p << " BTC\n";
  write_text_file(dir + "/backtest.csv", backtest::records_to_csv(records));
  return records;
}

// drive one classical strategy over the same held-out span the agents
// face; records land beside the run folders for plotting and tables
inline std::vector<backtest::BacktestRecord> backtest_baseline_strategy(const Workspace& ws,
                                                                        const std::string& abbrev) {
  NetConfig cfg = load_net_config(ws.config_path());
  LoadedMarket mk = load_market(ws, cfg);
  backtest::BaselineStrategy strat(baselines::make_baseline(abbrev, mk.matrix.m()));
  backtest::BacktestConfig bc;
  bc.t_start = mk.split.test_start;
  bc.t_end = mk.split.test_end;
  bc.commissions = {cfg.trading.trading_consumption, cfg.trading.trading_consumption};
  auto records = backtest::run_backtest(strat, mk.matrix, bc);
  std::filesystem::create_directories(ws.backtests_dir());
  write_text_file(ws.backtests_dir() + "/" + abbrev + ".csv", backtest::records_to_csv(records));
  return records;
}

inline bool is_run_index(const std::string& token) {
  return !token.empty() && token.find_first_not_of("0123456789") == std::string::npos;
}

// where the records of an --algos token live: run folders for indexes,
// the shared backtests directory for strategy abbreviations
inline std::string records_path(const Workspace& ws, const std::string& token) {
  if (is_run_index(token)) return ws.folder(int(parse_i64(token, "run index"))) + "/backtest.csv";
  return ws.backtests_dir() + "/" + token + ".csv";
}

}  // namespace portlab::report
