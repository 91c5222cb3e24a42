#pragma once

#include <atomic>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "portlab/backtest/metrics.hpp"
#include "portlab/report/plot.hpp"
#include "portlab/report/run_folder.hpp"
#include "portlab/report/table.hpp"

namespace portlab::report {

namespace detail {

// strategies quoted in the literature that this build does not ship;
// tables still list them so columns line up across publications
inline bool is_table_stub(const std::string& token) {
  return token == "cwmr" || token == "bk" || token == "bnn" || token == "cornk";
}

inline std::vector<std::string> csv_tokens(const std::string& joined, const std::string& what) {
  if (joined.empty()) throw config_error(what + ": --algo is required (comma-separated)");
  std::vector<std::string> tokens;
  for (const auto& piece : split(joined, ',')) {
    if (piece.empty()) throw config_error(what + ": empty entry in --algo list");
    tokens.emplace_back(piece);
  }
  return tokens;
}

inline std::vector<backtest::BacktestRecord> load_records(const Workspace& ws, const std::string& token) {
  const std::string path = records_path(ws, token);
  if (!std::filesystem::exists(path))
    throw validation_error("no backtest records for '" + token + "' (expected " + path +
                           "); run the backtest mode first");
  return backtest::records_from_csv(read_text_file(path), path);
}

}  // namespace detail

// the workbench entry point, exposed for testing: argv without the program
// name in, exit code out, all writing funnelled through the two streams
inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"portfolio policy training and backtesting workbench"};
  std::string mode;
  app.add_option("mode", mode, "generate | download_data | train | backtest | plot | table")
      ->required()
      ->check(CLI::IsMember({"generate", "download_data", "train", "backtest", "plot", "table"}));
  int repeat = 1;
  app.add_option("--repeat", repeat, "run folders to create (generate)");
  int processes = 1;
  app.add_option("--processes", processes, "parallel training workers (train)");
  std::string device = "cpu";
  app.add_option("--device", device, "accepted for compatibility; only cpu exists");
  std::string algos;
  app.add_option("--algos,--algo", algos, "comma-separated run indexes and strategy abbreviations");
  std::string labels_joined;
  app.add_option("--labels", labels_joined, "comma-separated labels, one per --algo entry");
  std::string format = "raw";
  app.add_option("--format", format, "table output: raw, csv, html or latex");
  std::string root = ".";
  app.add_option("--root", root, "workspace directory holding net_config.json");

  std::vector<const char*> argv;
  argv.push_back("portlab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Workspace ws{root};
  try {
    if (device != "cpu") out << "device '" << device << "' is not available here; using cpu\n";

    if (mode == "generate") {
      NetConfig cfg = load_net_config(ws.config_path());
      generate_folders(ws, cfg, repeat, out);

    } else if (mode == "download_data") {
      NetConfig cfg = load_net_config(ws.config_path());
      ensure_database(ws, cfg, &out);
      out << "database ready at " << ws.database_path() << "\n";

    } else if (mode == "train") {
      auto folders = list_run_folders(ws);
      if (folders.empty())
        throw validation_error("train: no run folders under " + ws.package_dir() +
                               "; run the generate mode first");
      // fill the candle store once, up front, so workers never race the fetch
      for (int idx : folders)
        ensure_database(ws, load_net_config(ws.folder(idx) + "/net_config.json"), &out);

      std::vector<SummaryRow> rows(folders.size());
      std::vector<char> done(folders.size(), 0);
      std::vector<std::string> failures;
      std::atomic<size_t> next{0};
      std::mutex io;
      const size_t workers = size_t(std::clamp<int>(processes, 1, int(folders.size())));
      auto work = [&] {
        for (size_t k = next.fetch_add(1); k < folders.size(); k = next.fetch_add(1)) {
          try {
            rows[k] = train_folder(ws, folders[k]);
            done[k] = 1;
            std::lock_guard<std::mutex> lock(io);
            out << "folder " << folders[k] << " trained: test portfolio value "
                << format_double(rows[k].test_portfolio_value) << "\n";
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(io);
            failures.push_back("folder " + std::to_string(folders[k]) + ": " + e.what());
          }
        }
      };
      std::vector<std::thread> pool;
      for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
      work();
      for (auto& th : pool) th.join();

      std::vector<SummaryRow> fresh;
      for (size_t k = 0; k < rows.size(); ++k)
        if (done[k]) fresh.push_back(rows[k]);
      if (!fresh.empty()) merge_summary(ws, fresh);
      for (const auto& f : failures) err << "error: " << f << "\n";
      if (!failures.empty()) return 1;
      out << "summary written to " << ws.summary_path() << "\n";

    } else if (mode == "backtest") {
      for (const auto& token : detail::csv_tokens(algos, "backtest")) {
        auto records = is_run_index(token) ? backtest_folder(ws, int(parse_i64(token, "run index")))
                                           : backtest_baseline_strategy(ws, token);
        out << token << ": " << records.size() << " periods, final value "
            << format_double(backtest::compute_fapv(records)) << "\n";
      }

    } else if (mode == "plot") {
      auto tokens = detail::csv_tokens(algos, "plot");
      std::vector<std::string> labels = tokens;
      if (!labels_joined.empty()) labels = detail::csv_tokens(labels_joined, mode);
      if (labels.size() != tokens.size())
        throw config_error("plot: got " + std::to_string(labels.size()) + " labels for " +
                           std::to_string(tokens.size()) + " algos");
      std::vector<PlotSeries> series;
      for (size_t i = 0; i < tokens.size(); ++i)
        series.push_back({labels[i], detail::load_records(ws, tokens[i])});
      const std::string path = ws.package_dir() + "/plot.svg";
      std::filesystem::create_directories(ws.package_dir());
      write_text_file(path, emit_plot_svg(series));
      out << "wrote " << path << "\n";

    } else if (mode == "table") {
      const TableFormat table_format = parse_table_format(format);  // before any file work
      auto tokens = detail::csv_tokens(algos, "table");
      std::vector<std::string> labels = tokens;
      if (!labels_joined.empty()) labels = detail::csv_tokens(labels_joined, mode);
      if (labels.size() != tokens.size())
        throw config_error("table: got " + std::to_string(labels.size()) + " labels for " +
                           std::to_string(tokens.size()) + " algos");
      std::vector<TableRow> rows;
      for (size_t i = 0; i < tokens.size(); ++i) {
        TableRow row;
        row.label = labels[i];
        if (detail::is_table_stub(tokens[i])) {
          row.implemented = false;
        } else {
          row.report = backtest::summarize(detail::load_records(ws, tokens[i]));
        }
        rows.push_back(std::move(row));
      }
      out << emit_table(rows, table_format);

    } else {
      err << "error: unknown mode '" << mode << "'\n";
      return 2;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace portlab::report
