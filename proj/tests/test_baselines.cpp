#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "portlab/baselines/strategies.hpp"

using namespace portlab;
using namespace portlab::baselines;
using portfolio::Weights;

namespace {

std::vector<Weights> random_history(int slots, int periods, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.85, 1.18);
  std::vector<Weights> h(size_t(periods), Weights{});
  for (auto& y : h) {
    y.assign(size_t(slots), 1.0);
    for (size_t i = 1; i < y.size(); ++i) y[i] = u(rng);
  }
  return h;
}

double dist2(const Weights& a, const Weights& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("simplex projection closed forms") {
  auto w = project_to_simplex({1.0, 1.0});
  CHECK(w[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(w[1] == Catch::Approx(0.5).margin(1e-15));

  w = project_to_simplex({2.0, 0.0});
  CHECK(w[0] == Catch::Approx(1.0).margin(1e-15));
  CHECK(w[1] == Catch::Approx(0.0).margin(1e-15));

  // already inside: unchanged (idempotence)
  Weights inside = {0.2, 0.3, 0.5};
  w = project_to_simplex(inside);
  for (size_t i = 0; i < inside.size(); ++i) CHECK(w[i] == Catch::Approx(inside[i]).margin(1e-15));
  auto again = project_to_simplex(w);
  CHECK(again == w);

  CHECK_THROWS_AS(project_to_simplex({}), validation_error);
  CHECK_THROWS_AS(project_to_simplex({1.0, std::nan("")}), validation_error);
}

TEST_CASE("simplex projection lands on the nearest point") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> e(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    Weights v(4);
    for (auto& x : v) x = u(rng);
    Weights w = project_to_simplex(v);
    portfolio::validate_simplex(w, "projection");
    double dw = dist2(v, w);
    for (int k = 0; k < 100; ++k) {
      Weights q(4);
      double s = 0.0;
      for (auto& x : q) s += (x = -std::log1p(-e(rng)));
      for (auto& x : q) x /= s;
      CHECK(dw <= dist2(v, q) + 1e-12);
    }
  }
}

TEST_CASE("every strategy stays on the simplex over random histories") {
  auto history = random_history(5, 120, 77);
  for (const auto& name : baseline_abbreviations()) {
    auto s = make_baseline(name, 4);
    if (s->wants_hindsight()) s->prime(history);
    Weights w_prev(5, 0.0);
    w_prev[0] = 1.0;  // start all in cash
    std::vector<Weights> seen;
    for (const auto& y : history) {
      INFO(name << " at period " << seen.size());
      Weights w = decide_baseline(*s, seen, w_prev);  // validates the simplex
      w_prev = w;
      seen.push_back(y);
    }
  }
}

TEST_CASE("strategies are deterministic") {
  auto history = random_history(4, 60, 31);
  for (const auto& name : baseline_abbreviations()) {
    auto a = make_baseline(name, 3);
    auto b = make_baseline(name, 3);
    if (a->wants_hindsight()) {
      a->prime(history);
      b->prime(history);
    }
    Weights prev(4, 0.25);
    std::vector<Weights> seen;
    for (const auto& y : history) {
      INFO(name);
      CHECK(a->decide(seen, prev) == b->decide(seen, prev));
      seen.push_back(y);
    }
  }
}

TEST_CASE("history may not shrink between decisions") {
  auto s = make_baseline("eg", 3);
  auto history = random_history(4, 10, 9);
  Weights prev(4, 0.25);
  s->decide(history, prev);
  history.pop_back();
  CHECK_THROWS_AS(s->decide(history, prev), validation_error);
}

TEST_CASE("buy-and-hold drifts with the market and never rebalances") {
  Ubah s(2);
  Weights prev = {1.0, 0.0, 0.0};
  // before any move: even split over the assets, no cash
  auto w0 = s.decide({}, prev);
  CHECK(w0[0] == 0.0);
  CHECK(w0[1] == Catch::Approx(0.5).margin(1e-15));

  // asset 1 doubles: its share grows to 2/3 with no trading
  auto w1 = s.decide({{1.0, 2.0, 1.0}}, w0);
  CHECK(w1[0] == 0.0);
  CHECK(w1[1] == Catch::Approx(2.0 / 3).margin(1e-12));
  CHECK(w1[2] == Catch::Approx(1.0 / 3).margin(1e-12));
}

TEST_CASE("best stock goes all-in on the window winner") {
  BestStock s(2);
  // cumulative factors 1.2 and 2.31 over the window
  std::vector<Weights> window = {{1.0, 1.2, 2.2}, {1.0, 1.0, 1.05}};
  s.prime(window);
  auto w = s.decide({}, {1.0, 0.0, 0.0});
  CHECK(w == Weights{0.0, 0.0, 1.0});

  // when every asset loses, staying in cash is the hindsight winner
  BestStock cashy(2);
  cashy.prime({{1.0, 0.9, 0.8}, {1.0, 0.95, 0.9}});
  CHECK(cashy.decide({}, {1.0, 0.0, 0.0}) == Weights{1.0, 0.0, 0.0});

  // exact ties resolve to the lowest index
  BestStock tied(2);
  tied.prime({{1.0, 2.0, 2.0}});
  CHECK(tied.decide({}, {1.0, 0.0, 0.0}) == Weights{0.0, 1.0, 0.0});
}

TEST_CASE("constant-mix rules ignore the history") {
  auto history = random_history(4, 20, 5);
  Ucrp ucrp(3);
  M0 m0(3);
  for (size_t k : {size_t(0), size_t(7), size_t(20)}) {
    std::vector<Weights> h(history.begin(), history.begin() + k);
    auto u = ucrp.decide(h, Weights(4, 0.25));
    for (double v : u) CHECK(v == 0.25);
    auto f = m0.decide(h, Weights(4, 0.25));
    CHECK(f[0] == 0.0);
    for (size_t i = 1; i < 4; ++i) CHECK(f[i] == Catch::Approx(1.0 / 3).margin(1e-15));
  }
}

TEST_CASE("a zero learning rate freezes the exponentiated-gradient mix") {
  Eg s(3, 0.0);
  auto history = random_history(4, 30, 11);
  std::vector<Weights> seen;
  for (const auto& y : history) {
    auto w = s.decide(seen, Weights(4, 0.25));
    for (double v : w) CHECK(v == Catch::Approx(0.25).margin(1e-15));
    seen.push_back(y);
  }
}

TEST_CASE("exponentiated gradient tilts toward the rising asset") {
  Eg s(2);
  std::vector<Weights> seen;
  for (int t = 0; t < 30; ++t) seen.push_back({1.0, 1.05, 0.97});
  auto w = s.decide(seen, Weights(3, 1.0 / 3));
  CHECK(w[1] > w[0]);
  CHECK(w[1] > w[2]);
}

TEST_CASE("flat prices leave the passive-aggressive rules alone") {
  std::vector<Weights> flat(12, Weights(4, 1.0));
  for (const char* name : {"pamr", "olmar", "wmamr", "rmr"}) {
    auto s = make_baseline(name, 3);
    auto w = s->decide(flat, Weights(4, 0.25));
    INFO(name);
    for (double v : w) CHECK(v == Catch::Approx(0.25).margin(1e-12));
  }
}

TEST_CASE("the reversion step solves its quadratic by hand") {
  // w uniform, prediction (1,2,3), margin 10: tau = 4, projection pushes
  // everything onto the best-predicted asset
  Weights w = reversion_step({1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0, 2.0, 3.0}, 10.0);
  CHECK(w[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(w[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(w[2] == Catch::Approx(1.0).margin(1e-12));

  // margin already met: untouched
  Weights same = reversion_step({0.2, 0.3, 0.5}, {1.0, 1.1, 0.9}, 0.5);
  CHECK(same == Weights{0.2, 0.3, 0.5});
}

TEST_CASE("reversion rules buy the dip") {
  // asset 1 crashes in the last period; its window mean sits far above
  // the latest price, so the predicted relative favors it strongly
  std::vector<Weights> h;
  for (int t = 0; t < 6; ++t) h.push_back({1.0, 1.0, 1.0});
  h.push_back({1.0, 0.5, 1.0});
  for (const char* name : {"olmar", "rmr"}) {
    auto s = make_baseline(name, 2);
    auto w = s->decide(h, Weights(3, 1.0 / 3));
    INFO(name);
    CHECK(w[1] > 0.9);
  }
}

TEST_CASE("mean reversion steps away from the period winner") {
  Pamr s(2);
  std::vector<Weights> h = {{1.0, 1.5, 0.8}};
  auto w = s.decide(h, Weights(3, 1.0 / 3));
  CHECK(w[1] < 1.0 / 3);  // the spike is expected to revert
  CHECK(w[2] > 1.0 / 3);
}

TEST_CASE("the universal mix chases cumulative wealth") {
  Up s(2, 4000, 12345);
  std::vector<Weights> seen;
  for (int t = 0; t < 25; ++t) seen.push_back({1.0, 1.2, 0.9});
  auto w = s.decide(seen, Weights(3, 1.0 / 3));
  CHECK(w[1] > w[0]);
  CHECK(w[1] > w[2]);
  CHECK(w[1] > 0.45);  // wealth weighting pulls well above the uniform 1/3
}

TEST_CASE("newton-step machinery solves small systems exactly") {
  auto x = detail::solve_spd({{2.0, 1.0}, {1.0, 2.0}}, {1.0, 2.0});
  CHECK(x[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(x[1] == Catch::Approx(1.0).margin(1e-12));

  // identity metric reduces to the Euclidean projection
  Weights v = {0.7, 0.6, -0.2};
  auto a = detail::project_in_norm(v, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto b = project_to_simplex(v);
  for (size_t i = 0; i < v.size(); ++i) CHECK(a[i] == Catch::Approx(b[i]).margin(1e-9));

  // anisotropic metric: minimize (x-1.5)^2 + 100 (y-0.2)^2 on the line
  // x + y = 1 -> y = 39/202
  auto c = detail::project_in_norm({1.5, 0.2}, {{1.0, 0.0}, {0.0, 100.0}});
  CHECK(c[1] == Catch::Approx(39.0 / 202.0).margin(1e-6));
}

TEST_CASE("the median predictor shrugs off one outlier") {
  std::vector<std::vector<double>> pts = {{1.0, 1.0}, {1.01, 1.0}, {0.99, 1.0}, {1.0, 1.0}, {100.0, 1.0}};
  auto med = detail::l1_median(pts, 200, 1e-9);
  CHECK(med[0] < 1.5);  // the mean would sit near 20.8
  CHECK(med[1] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("trailing price paths invert the relatives") {
  // prices of asset 1: 4, 2, 1 -> relatives 0.5 then 0.5
  std::vector<Weights> h = {{1.0, 0.5}, {1.0, 0.5}};
  auto p = detail::trailing_prices(h, 1, 3);
  CHECK(p[0][1] == Catch::Approx(1.0).margin(1e-15));
  CHECK(p[1][1] == Catch::Approx(2.0).margin(1e-12));
  CHECK(p[2][1] == Catch::Approx(4.0).margin(1e-12));
  for (int k = 0; k < 3; ++k) CHECK(p[size_t(k)][0] == 1.0);  // cash never moves
}

TEST_CASE("correlation-driven transfers need two full windows") {
  Anticor s(2, 5);
  auto history = random_history(3, 9, 3);
  Weights prev = {0.5, 0.25, 0.25};
  CHECK(s.decide(history, prev) == prev);  // 9 < 10: still warming up

  // flat windows carry no correlation signal: the mix stays uniform
  Anticor flat(2, 5);
  std::vector<Weights> ones(10, Weights(3, 1.0));
  auto w = flat.decide(ones, prev);
  for (double v : w) CHECK(v == Catch::Approx(1.0 / 3).margin(1e-12));
}

TEST_CASE("warm-up hands back the current holdings") {
  for (const char* name : {"olmar", "rmr", "wmamr", "anticor"}) {
    auto s = make_baseline(name, 3);
    Weights prev = {0.1, 0.2, 0.3, 0.4};
    INFO(name);
    CHECK(s->decide({}, prev) == prev);
    CHECK(s->decide({{1.0, 1.1, 0.9, 1.0}}, prev) == prev);
  }
}

TEST_CASE("the registry knows its strategies") {
  CHECK(baseline_abbreviations().size() == 12);
  for (const auto& name : baseline_abbreviations()) CHECK(make_baseline(name, 3)->abbrev() == name);
  CHECK_THROWS_WITH(make_baseline("cwmr", 3), Catch::Matchers::ContainsSubstring("not implemented"));
  CHECK_THROWS_WITH(make_baseline("bk", 3), Catch::Matchers::ContainsSubstring("not implemented"));
  CHECK_THROWS_WITH(make_baseline("nope", 3), Catch::Matchers::ContainsSubstring("unknown strategy"));
  CHECK_THROWS_AS(make_baseline("ubah", 0), validation_error);
}

TEST_CASE("malformed relatives are rejected") {
  auto s = make_baseline("pamr", 2);
  Weights prev(3, 1.0 / 3);
  CHECK_THROWS_AS(s->decide({{1.0, 0.5}}, prev), validation_error);           // wrong length
  CHECK_THROWS_AS(s->decide({{1.1, 0.5, 1.0}}, prev), validation_error);      // cash moved
  CHECK_THROWS_AS(s->decide({{1.0, -0.5, 1.0}}, prev), validation_error);     // negative price
  CHECK_THROWS_AS(s->decide({{1.0, 1.0, 1.0}}, {0.5, 0.5}), validation_error);  // bad w_prev
}
