#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "portlab/market/synthetic.hpp"
#include "portlab/train/trainer.hpp"

using namespace portlab;
using namespace portlab::train;

namespace {

// flat-price market: every relative move is exactly 1
market::GlobalPriceMatrix constant_market(int m, int T) {
  market::GlobalPriceMatrix mat;
  for (int i = 0; i < m; ++i) mat.assets.push_back("A" + std::to_string(i));
  mat.period_seconds = 1800;
  for (int t = 0; t < T; ++t) mat.periods.push_back(1800 * t);
  mat.close.assign(size_t(m) * size_t(T), 1.0);
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < T; ++t) mat.close[size_t(i) * size_t(T) + size_t(t)] = double(i + 1);
  mat.high = mat.close;
  mat.low = mat.close;
  mat.fill_mask.assign(size_t(m) * size_t(T), 1);
  return mat;
}

market::GlobalPriceMatrix matrix_from_closes(const std::vector<std::vector<double>>& rows) {
  market::GlobalPriceMatrix mat;
  const int m = int(rows.size()), T = int(rows[0].size());
  for (int i = 0; i < m; ++i) mat.assets.push_back("A" + std::to_string(i));
  mat.period_seconds = 1800;
  for (int t = 0; t < T; ++t) mat.periods.push_back(1800 * t);
  mat.close.resize(size_t(m) * size_t(T));
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < T; ++t) mat.close[size_t(i) * size_t(T) + size_t(t)] = rows[size_t(i)][size_t(t)];
  mat.high = mat.close;
  mat.low = mat.close;
  mat.fill_mask.assign(size_t(m) * size_t(T), 1);
  return mat;
}

// two assets moving against each other: ideal ground for a policy to beat
// holding either one
market::GlobalPriceMatrix sinusoid_market(int T, double amplitude = 0.2, uint64_t seed = 5) {
  market::SyntheticMarketSpec spec;
  spec.periods = T;
  spec.seed = seed;
  market::SyntheticAssetSpec a;
  a.id = "SINA";
  a.season_amplitude = amplitude;
  a.season_period = 20.0;
  market::SyntheticAssetSpec b = a;
  b.id = "SINB";
  b.season_phase = 3.14159265358979323846;
  spec.assets = {a, b};
  return market::generate_synthetic_market(spec);
}

policy::EiieTopologySpec small_cnn() {
  policy::LayerSpec conv;
  conv.type = "ConvLayer";
  conv.filter_number = 2;
  conv.filter_shape = {1, 2};
  policy::LayerSpec dense;
  dense.type = "EIIE_Dense";
  dense.filter_number = 3;
  dense.regularizer = "L2";
  dense.weight_decay = 1e-6;
  policy::LayerSpec out;
  out.type = "EIIE_Output_WithW";
  out.regularizer = "L2";
  out.weight_decay = 1e-6;
  return policy::EiieTopologySpec::from_layers({conv, dense, out});
}

TrainingConfig quick_config(int batch) {
  TrainingConfig cfg;
  cfg.batch_size = batch;
  cfg.buffer_decay = 0.05;
  cfg.log_every = 0;
  return cfg;
}

}  // namespace

TEST_CASE("memory rows start uniform and are validated on access") {
  Pvm pvm(10, 3);
  CHECK(pvm.rows() == 10);
  CHECK(pvm.width() == 4);
  CHECK(pvm.max_written() == -1);
  for (double v : pvm.read(7)) CHECK(v == 0.25);

  pvm.write(4, {0.4, 0.3, 0.2, 0.1});
  CHECK(pvm.read(4)[0] == 0.4);
  CHECK(pvm.max_written() == 4);
  pvm.write(2, {0.25, 0.25, 0.25, 0.25});
  CHECK(pvm.max_written() == 4);  // earlier rows do not lower the mark

  CHECK_THROWS_AS(pvm.read(10), range_error);
  CHECK_THROWS_AS(pvm.read(-1), range_error);
  CHECK_THROWS_AS(pvm.write(3, {0.5, 0.5}), validation_error);
  CHECK_THROWS_AS(pvm.write(3, {0.5, 0.4, 0.2, -0.1}), validation_error);
  CHECK_THROWS_AS(Pvm(0, 3), validation_error);
}

TEST_CASE("memory survives a save/load round trip bitwise") {
  Pvm pvm(5, 2);
  pvm.write(0, {0.1, 0.2, 0.7});
  pvm.write(3, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  std::string path = "pvm_roundtrip.bin";
  pvm.save(path);
  Pvm back = Pvm::load(path);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.width() == 3);
  for (int t = 0; t < 5; ++t) {
    auto a = pvm.read(t), b = back.read(t);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  CHECK_THROWS_AS(Pvm::load("no_such_file.bin"), io_error);
  write_text_file("pvm_bad.bin", "PLPVM1\nxx");
  CHECK_THROWS_AS(Pvm::load("pvm_bad.bin"), parse_error);
  std::remove(path.c_str());
  std::remove("pvm_bad.bin");
}

TEST_CASE("batch starts favor the present geometrically") {
  const int t_min = 3, t_now = 60, n_b = 10;
  const double beta = 0.1;
  auto pmf = batch_start_pmf(t_min, t_now, n_b, beta);
  const int hi = t_now - n_b;
  REQUIRE(int(pmf.size()) == hi - t_min + 1);
  CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == Catch::Approx(1.0).margin(1e-12));
  // one step older is (1-beta) times as likely, every consecutive pair
  for (size_t k = 0; k + 1 < pmf.size(); ++k)
    CHECK(pmf[k] / pmf[k + 1] == Catch::Approx(1.0 - beta).margin(1e-12));

  std::mt19937_64 rng(123);
  const int draws = 200000;
  std::vector<double> freq(pmf.size(), 0.0);
  for (int d = 0; d < draws; ++d) {
    int t = sample_batch_start(rng, t_min, t_now, n_b, beta);
    REQUIRE(t >= t_min);
    REQUIRE(t <= hi);
    freq[size_t(t - t_min)] += 1.0 / draws;
  }
  double tv = 0.0;
  for (size_t k = 0; k < pmf.size(); ++k) tv += std::abs(freq[k] - pmf[k]);
  CHECK(tv / 2 < 0.01);  // total variation between the sample and the law
}

TEST_CASE("degenerate sampling cases") {
  std::mt19937_64 rng(1);
  // beta = 1 always takes the newest batch
  for (int i = 0; i < 20; ++i) CHECK(sample_batch_start(rng, 0, 50, 10, 1.0) == 40);
  // a single admissible start needs no randomness
  CHECK(sample_batch_start(rng, 7, 17, 10, 0.5) == 7);
  CHECK_THROWS_AS(sample_batch_start(rng, 8, 17, 10, 0.5), range_error);
  CHECK_THROWS_AS(sample_batch_start(rng, 0, 50, 0, 0.5), validation_error);
  CHECK_THROWS_AS(sample_batch_start(rng, 0, 50, 10, 0.0), validation_error);
  CHECK_THROWS_AS(sample_batch_start(rng, 0, 50, 10, 1.5), validation_error);
}

TEST_CASE("flat prices and free trading make the loss pure weight penalty") {
  auto mat = constant_market(2, 40);
  auto net = build_network(small_cnn(), 2, 4, 3, 9);
  auto cfg = quick_config(8);
  cfg.commissions = {0.0, 0.0};
  Trainer tr(net, mat, cfg);
  CHECK(tr.batch_loss(10) == Catch::Approx(tr.penalty()).margin(1e-15));

  cfg.fast_train = false;
  Trainer exact(net, mat, cfg);
  CHECK(exact.batch_loss(10) == tr.batch_loss(10));
}

TEST_CASE("batch loss matches a hand replay of the accounting") {
  auto mat = matrix_from_closes({{1.0, 1.0, 2.0, 1.0, 3.0, 1.5},
                                 {2.0, 2.0, 2.0, 4.0, 2.0, 2.0}});
  auto net = build_network(small_cnn(), 2, 2, 3, 4);
  // zeroed parameters pin every decision to the uniform vector
  for (int p = 0; p < net.graph.param_count(); ++p) net.graph.param_value(p).fill(0.0);

  auto cfg = quick_config(2);
  cfg.fast_train = true;
  Trainer tr(net, mat, cfg);

  const double c = 0.0025;
  const portfolio::Weights uni = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  double expected = 0.0;
  for (int t = 2; t <= 3; ++t) {
    portfolio::Weights y = market::relative_price(mat, t);
    portfolio::Weights evolved = portfolio::evolved_weights(y, uni);
    double turn = 0.0;
    for (size_t i = 1; i < 3; ++i) turn += std::abs(evolved[i] - uni[i]);
    double mu = 1.0 - c * turn;
    portfolio::Weights y1 = market::relative_price(mat, t + 1);
    double gross = (y1[0] + y1[1] + y1[2]) / 3.0;
    expected += std::log(mu * gross);
  }
  expected = -expected / 2.0;
  CHECK(tr.batch_loss(2) == Catch::Approx(expected).margin(1e-14));
}

TEST_CASE("analytic batch gradients agree with finite differences") {
  auto mat = sinusoid_market(30);
  // the exact-remainder path differentiates through a fixed point solved to
  // 1e-10, so its finite differences carry a little iteration noise
  auto check = [&](bool fast, double tol) {
    auto net = build_network(small_cnn(), 2, 3, 3, 17);
    auto cfg = quick_config(4);
    cfg.fast_train = fast;
    Trainer tr(net, mat, cfg);
    // non-uniform memory rows so the evolved weights exercise the remainder
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int t = 0; t < 12; ++t) {
      portfolio::Weights w(3);
      double s = 0.0;
      for (auto& v : w) s += (v = u(rng));
      for (auto& v : w) v /= s;
      tr.pvm().write(t, w);
    }

    const int t_b = 5;
    auto [loss, grads] = tr.batch_backward(t_b);
    CHECK(std::isfinite(loss));
    ad::Graph& g = net.graph;
    double worst = 0.0;
    for (int p = 0; p < g.param_count(); ++p) {
      ad::Tensor& theta = g.param_value(p);
      for (int i = 0; i < theta.size(); ++i) {
        double keep = theta[i];
        double h = 1e-6 * std::max(1.0, std::abs(keep));
        theta[i] = keep + h;
        double up = tr.batch_loss(t_b);
        theta[i] = keep - h;
        double dn = tr.batch_loss(t_b);
        theta[i] = keep;
        double fd = (up - dn) / (2 * h);
        double rel = std::abs(fd - grads[size_t(p)][i]) /
                     std::max({std::abs(fd), std::abs(grads[size_t(p)][i]), 1e-4});
        worst = std::max(worst, rel);
      }
    }
    CAPTURE(fast, worst);
    CHECK(worst < tol);
  };
  check(true, 1e-5);
  check(false, 1e-4);
}

TEST_CASE("zero steps leave the parameters untouched") {
  auto mat = sinusoid_market(60);
  auto net = build_network(small_cnn(), 2, 4, 3, 2);
  auto before = net.graph.param_value(0).values();
  auto cfg = quick_config(6);
  cfg.steps = 0;
  Trainer tr(net, mat, cfg);
  tr.train_offline(50, 60);
  CHECK(net.graph.param_value(0).values() == before);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto mat = sinusoid_market(80);
  auto run = [&](uint64_t seed) {
    auto net = build_network(small_cnn(), 2, 4, 3, 1);
    auto cfg = quick_config(8);
    cfg.seed = seed;
    cfg.steps = 12;
    Trainer tr(net, mat, cfg);
    tr.train_offline(70, 80);
    std::vector<double> flat;
    for (int p = 0; p < net.graph.param_count(); ++p)
      for (int i = 0; i < net.graph.param_value(p).size(); ++i) flat.push_back(net.graph.param_value(p)[i]);
    return flat;
  };
  auto a = run(7), b = run(7), c = run(8);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("updates lower the training loss on a predictable market") {
  auto mat = sinusoid_market(300);
  auto net = build_network(small_cnn(), 2, 8, 3, 6);
  auto cfg = quick_config(16);
  cfg.learning_rate = 3e-3;
  cfg.buffer_decay = 5e-3;
  Trainer tr(net, mat, cfg);

  std::vector<double> losses;
  for (int step = 0; step < 400; ++step) losses.push_back(tr.batch_update(280, cfg.learning_rate).loss);
  double early = std::accumulate(losses.begin(), losses.begin() + 50, 0.0) / 50;
  double late = std::accumulate(losses.end() - 50, losses.end(), 0.0) / 50;
  CHECK(late < early);
}

TEST_CASE("the memory receives every batch decision") {
  auto mat = sinusoid_market(60);
  auto net = build_network(small_cnn(), 2, 4, 3, 3);
  auto cfg = quick_config(10);
  Trainer tr(net, mat, cfg);
  auto st = tr.batch_update(50, cfg.learning_rate);
  CHECK(tr.pvm().max_written() == st.t_start + 9);
  auto row = tr.pvm().read(st.t_start);
  CHECK(row != portfolio::Weights(3, 1.0 / 3));  // no longer the uniform fill
  portfolio::validate_simplex(row, "written row");
}

TEST_CASE("rolling updates never touch prices beyond the current period") {
  auto base = sinusoid_market(100);
  auto shifted = base;
  const int t_now = 70;
  for (int i = 0; i < shifted.m(); ++i)
    for (int t = t_now + 1; t < shifted.T(); ++t) {
      size_t idx = size_t(i) * size_t(shifted.T()) + size_t(t);
      shifted.close[idx] *= 3.0;
      shifted.high[idx] *= 3.0;
      shifted.low[idx] *= 3.0;
    }

  auto run = [&](const market::GlobalPriceMatrix& mat) {
    auto net = build_network(small_cnn(), 2, 4, 3, 11);
    auto cfg = quick_config(8);
    cfg.rolling_steps = 5;
    cfg.seed = 42;
    Trainer tr(net, mat, cfg);
    tr.rolling_train(t_now);
    return net.graph.param_value(net.graph.find_param("score/W")).values();
  };
  CHECK(run(base) == run(shifted));
}

TEST_CASE("rolling updates wait for enough history") {
  auto mat = sinusoid_market(40);
  auto net = build_network(small_cnn(), 2, 4, 3, 11);
  auto cfg = quick_config(20);
  Trainer tr(net, mat, cfg);
  auto before = net.graph.param_value(0).values();
  tr.rolling_train(10);  // only 8 decidable periods so far, batch needs 20
  CHECK(net.graph.param_value(0).values() == before);
}

TEST_CASE("corrupt parameters surface as numerical errors") {
  auto mat = sinusoid_market(40);
  auto net = build_network(small_cnn(), 2, 4, 3, 1);
  net.graph.param_value(net.graph.find_param("cash_bias"))[0] =
      std::numeric_limits<double>::quiet_NaN();
  Trainer tr(net, mat, quick_config(6));
  CHECK_THROWS_AS(tr.batch_loss(8), numerical_error);
}

TEST_CASE("progress lines report the held-out span") {
  auto mat = sinusoid_market(120);
  auto net = build_network(small_cnn(), 2, 4, 3, 5);
  auto cfg = quick_config(8);
  cfg.steps = 4;
  cfg.log_every = 2;
  Trainer tr(net, mat, cfg);
  std::ostringstream log;
  tr.train_offline(100, 120, &log);
  std::string text = log.str();
  CHECK(text.find("step 2\n") != std::string::npos);
  CHECK(text.find("step 4\n") != std::string::npos);
  CHECK(text.find("the portfolio value on test set is ") != std::string::npos);
  CHECK(text.find("log_mean is ") != std::string::npos);
  CHECK(text.find("loss_value is ") != std::string::npos);
  CHECK(text.find("log mean without commission fee is ") != std::string::npos);
}

TEST_CASE("held-out replay chains decisions and can persist them") {
  auto mat = sinusoid_market(120);
  auto net = build_network(small_cnn(), 2, 4, 3, 5);
  auto cfg = quick_config(8);
  Trainer tr(net, mat, cfg);

  auto es = tr.evaluate_split(100, 120, true);
  CHECK(es.decisions == 19);  // decisions at 100..118, each with a known next move
  CHECK(es.portfolio_value > 0.0);
  CHECK(std::exp(es.log_mean * es.decisions) == Catch::Approx(es.portfolio_value).epsilon(1e-10));
  CHECK(es.log_mean_free >= es.log_mean);  // commission can only hurt
  CHECK(es.loss == Catch::Approx(-es.log_mean + tr.penalty()).margin(1e-15));
  CHECK(tr.pvm().max_written() == 118);

  // identical inputs replay to identical numbers
  auto again = tr.evaluate_split(100, 120, false);
  CHECK(again.portfolio_value == es.portfolio_value);

  CHECK_THROWS_AS(tr.evaluate_split(2, 1, false), range_error);
  CHECK_THROWS_AS(tr.evaluate_split(100, 121, false), range_error);
}

TEST_CASE("training rejects impossible spans") {
  auto mat = sinusoid_market(30);
  auto net = build_network(small_cnn(), 2, 4, 3, 1);
  auto cfg = quick_config(8);
  cfg.steps = 1;
  Trainer tr(net, mat, cfg);
  CHECK_THROWS_AS(tr.train_offline(10, 30), range_error);   // span shorter than a batch
  CHECK_THROWS_AS(tr.train_offline(31, 31), range_error);   // beyond the history
  CHECK_THROWS_AS(tr.batch_loss(2), range_error);           // window not full yet
  CHECK_THROWS_AS(tr.batch_loss(25), range_error);          // runs off the end
}
