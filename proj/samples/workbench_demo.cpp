// Workspace tour: the same circuit the command line offers, driven
// programmatically — write a config, generate two seeded run folders,
// train them, backtest alongside classical strategies, emit plot + table.
#include <filesystem>
#include <iostream>

#include "portlab/report/cli.hpp"

using namespace portlab;

int main() {
  const std::string root = "workbench_demo_ws";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  write_text_file(root + "/net_config.json", R"({
  "layers": [
    {"filter_shape": [1, 3], "filter_number": 3, "type": "ConvLayer"},
    {"filter_number": 8, "type": "EIIE_Dense", "regularizer": "L2", "weight_decay": 5e-9},
    {"type": "EIIE_Output_WithW", "regularizer": "L2", "weight_decay": 5e-8}
  ],
  "training": {
    "steps": 500, "learning_rate": 0.00028, "batch_size": 20,
    "buffer_biased": 5e-5, "snap_shot": false, "fast_train": true,
    "training_method": "Adam", "loss_function": "loss_function6"
  },
  "input": {
    "window_size": 12, "coin_number": 3, "global_period": 1800,
    "feature_number": 3, "test_portion": 0.15, "online": true,
    "start_date": "2016/03/01", "end_date": "2016/03/15",
    "volume_average_days": 7, "portion_reversed": false
  },
  "trading": {
    "trading_consumption": 0.0025, "rolling_training_steps": 10,
    "learning_rate": 0.00028, "buffer_biased": 5e-5
  },
  "data_source": {
    "kind": "synthetic", "seed": 99,
    "assets": [
      {"id": "AAA", "drift": 3e-5, "volatility": 0.005, "season_amplitude": 0.03, "season_period": 96, "volume_scale": 9000},
      {"id": "BBB", "drift": -1e-5, "volatility": 0.004, "season_amplitude": 0.02, "season_period": 64, "season_phase": 2.0, "volume_scale": 7000},
      {"id": "CCC", "volatility": 0.006, "season_amplitude": 0.025, "season_period": 48, "season_phase": 4.0, "volume_scale": 8000}
    ]
  }
})");

  const std::vector<std::vector<std::string>> commands = {
      {"generate", "--repeat=2", "--root=" + root},
      {"train", "--processes=2", "--root=" + root},
      {"backtest", "--algo=0,1,ubah,ucrp,olmar,ons", "--root=" + root},
      {"plot", "--algos=0,1,ubah,ucrp", "--labels=run-0,run-1,buy-and-hold,rebalanced", "--root=" + root},
      {"table", "--algos=0,1,ubah,ucrp,olmar,ons", "--format=raw", "--root=" + root},
  };
  for (const auto& args : commands) {
    std::cout << "$ portlab";
    for (const auto& a : args) std::cout << ' ' << a;
    std::cout << '\n';
    int code = report::cli_main(args, std::cout, std::cerr);
    if (code != 0) return code;
  }
  std::cout << "\nartifacts left under " << root << "/train_package\n";
  return 0;
}
