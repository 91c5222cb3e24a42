// Library tour: make a synthetic market, train a small convolutional
// policy on the early span, backtest it against two classical strategies
// on the held-out tail, and print the comparison table.
#include <iostream>

#include "portlab/backtest/backtester.hpp"
#include "portlab/backtest/metrics.hpp"
#include "portlab/market/synthetic.hpp"
#include "portlab/report/table.hpp"
#include "portlab/train/trainer.hpp"

using namespace portlab;

int main() {
  market::SyntheticMarketSpec spec;
  spec.periods = 600;
  spec.period_seconds = 1800;
  spec.seed = 42;
  spec.assets = {
      {"AAA", 1.0, 3e-5, 0.005, 0.03, 90.0, 0.0, 1000.0},
      {"BBB", 2.0, -1e-5, 0.007, 0.02, 60.0, 1.0, 1000.0},
      {"CCC", 0.5, 1e-5, 0.004, 0.04, 120.0, 2.0, 1000.0},
  };
  market::GlobalPriceMatrix mat = market::generate_synthetic_market(spec);

  policy::EiieTopologySpec topo = policy::EiieTopologySpec::from_layers({
      {"ConvLayer", 3, {1, 4}, 0, "", 0.0},
      {"EIIE_Dense", 12, {1, 1}, 0, "L2", 5e-9},
      {"EIIE_Output_WithW", 0, {1, 1}, 0, "L2", 5e-8},
  });
  const int window = 16;
  policy::PolicyNetwork net = policy::build_network(topo, mat.m(), window, 3, /*seed=*/7);

  train::TrainingConfig tc;
  tc.steps = 1500;
  tc.batch_size = 30;
  tc.learning_rate = 3e-4;
  tc.commissions = {0.0025, 0.0025};
  tc.seed = 7;
  train::Trainer trainer(net, mat, tc);
  const int test_start = 500;
  for (int step = 0; step < tc.steps; ++step) trainer.batch_update(test_start - 1, tc.learning_rate);

  backtest::BacktestConfig bc;
  bc.t_start = test_start;
  bc.t_end = mat.T();
  bc.commissions = tc.commissions;

  std::vector<report::TableRow> rows;
  backtest::AgentStrategy agent(trainer, net);
  rows.push_back({"policy", true, backtest::summarize(backtest::run_backtest(agent, mat, bc))});
  for (const char* abbrev : {"ubah", "ucrp", "olmar"}) {
    backtest::BaselineStrategy strat(baselines::make_baseline(abbrev, mat.m()));
    rows.push_back({abbrev, true, backtest::summarize(backtest::run_backtest(strat, mat, bc))});
  }
  std::cout << report::emit_table(rows, report::TableFormat::raw);
  return 0;
}
