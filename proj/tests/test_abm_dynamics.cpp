#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"

using namespace sirsurv;
using namespace sirsurv::abm;

namespace {

AbmConfig small(Strategy kind, std::uint64_t seed = 1) {
  AbmConfig cfg;
  cfg.n = 2000;
  cfg.seed = seed;
  cfg.strategy.kind = kind;
  if (kind != Strategy::MeanField) cfg.b = 0.0;
  return cfg;
}

constexpr Strategy kAll[] = {Strategy::MeanField, Strategy::KNeighbor, Strategy::RandomFanout,
                             Strategy::BatteryInverse};

}  // namespace

TEST_CASE("names round-trip") {
  for (auto s : kAll) CHECK(parse_strategy(to_string(s)) == s);
  for (auto w : {DeathWiring::None, DeathWiring::Situation2, DeathWiring::Situations13}) {
    CHECK(parse_death_wiring(to_string(w)) == w);
  }
  CHECK_THROWS_AS(parse_strategy("flooding"), ValidationError);
}

TEST_CASE("config validation names the field") {
  AbmConfig cfg;
  cfg.c = 1.5;
  try {
    validate(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "c");
  }
  cfg = {};
  cfg.strategy.kind = Strategy::KNeighbor;
  cfg.n = 5;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg.strategy.kind = Strategy::MeanField;
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("initial informed count is exactly round(fraction * n)") {
  for (double frac : {0.0, 0.1, 0.25, 0.00049, 1.0}) {
    auto cfg = small(Strategy::MeanField);
    cfg.init_i_fraction = frac;
    cfg.t_steps = 0;
    const auto res = run(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].i == std::llround(frac * cfg.n));
    CHECK(res.rows[0].s == cfg.n - res.rows[0].i);
    CHECK(res.rows[0].mean_battery == 1.0);
  }
}

TEST_CASE("counts are conserved every step for every strategy and death wiring") {
  for (auto kind : kAll) {
    for (auto deaths : {DeathWiring::None, DeathWiring::Situation2, DeathWiring::Situations13}) {
      auto cfg = small(kind, 11);
      cfg.deaths = deaths;
      cfg.m = 0.02;
      cfg.m_prime = 0.05;
      cfg.strategy.tx_cost = 0.05;
      cfg.t_steps = 40;
      const auto res = run(cfg);
      REQUIRE(res.rows.size() == 41);
      for (const auto& row : res.rows) {
        CHECK(row.s + row.i + row.r + row.dead == cfg.n);
        CHECK(row.mean_battery >= 0.0);
        CHECK(row.mean_battery <= 1.0);
      }
      for (std::size_t k = 1; k < res.rows.size(); ++k) {
        CHECK(res.rows[k].dead >= res.rows[k - 1].dead);
        CHECK(res.rows[k].mean_battery <= res.rows[k - 1].mean_battery);
      }
    }
  }
}

TEST_CASE("no informed nodes: only the idle drain acts") {
  for (auto kind : kAll) {
    auto cfg = small(kind);
    cfg.init_i_fraction = 0.0;
    cfg.b = 0.9;
    cfg.t_steps = 10;
    const auto res = run(cfg);
    for (const auto& row : res.rows) {
      CHECK(row.s == cfg.n);
      CHECK(row.mean_battery == doctest::Approx(1.0 - row.t * cfg.strategy.idle_cost));
    }
  }
}

TEST_CASE("dead nodes stay dead and stop draining") {
  auto cfg = small(Strategy::BatteryInverse, 5);
  cfg.strategy.tx_cost = 0.1;
  cfg.t_steps = 0;
  const Topology topo = build_topology(cfg.n, cfg.k_topology, 99);
  auto state = initial_state(cfg, topo);
  for (int t = 0; t < 60; ++t) {
    const auto next = step(state, cfg, topo);
    for (std::size_t u = 0; u < state.nodes.size(); ++u) {
      if (state.nodes[u].compartment == Compartment::Dead) {
        CHECK(next.nodes[u].compartment == Compartment::Dead);
        CHECK(next.nodes[u].battery == state.nodes[u].battery);
      }
      CHECK(next.nodes[u].battery <= state.nodes[u].battery);
    }
    state = next;
  }
  CHECK(count(state).dead > 0);
}

TEST_CASE("battery accounting matches transmissions when nothing else kills") {
  for (auto kind : {Strategy::KNeighbor, Strategy::RandomFanout, Strategy::BatteryInverse}) {
    auto cfg = small(kind, 3);
    cfg.t_steps = 0;
    const Topology topo = build_topology(cfg.n, cfg.k_topology, 17);
    auto state = initial_state(cfg, topo);
    const int steps = 20;
    for (int t = 0; t < steps; ++t) state = step(state, cfg, topo);
    for (std::size_t u = 0; u < state.nodes.size(); ++u) {
      const double expected =
          1.0 - steps * cfg.strategy.idle_cost - state.spread[u].transmissions * cfg.strategy.tx_cost;
      REQUIRE(expected > 0.0);
      CHECK(state.nodes[u].battery == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("k-neighbour nodes transmit exactly once, the step after being informed") {
  auto cfg = small(Strategy::KNeighbor, 8);
  cfg.c = 0.0;
  cfg.strategy.k = 3;
  cfg.t_steps = 0;
  const Topology topo = build_topology(cfg.n, cfg.k_topology, 4);
  auto state = initial_state(cfg, topo);
  for (int t = 0; t < 15; ++t) {
    const auto next = step(state, cfg, topo);
    for (std::size_t u = 0; u < state.nodes.size(); ++u) {
      const auto sent = next.spread[u].transmissions - state.spread[u].transmissions;
      if (state.nodes[u].compartment == Compartment::I && state.spread[u].pending_broadcast) {
        CHECK(sent == 3);
        CHECK_FALSE(next.spread[u].pending_broadcast);
      } else {
        CHECK(sent == 0);
      }
    }
    state = next;
  }
}

TEST_CASE("random fan-out sends F messages over D steps") {
  auto cfg = small(Strategy::RandomFanout, 21);
  cfg.c = 0.0;
  cfg.t_steps = 0;
  const Topology topo = build_topology(cfg.n, cfg.k_topology, 5);
  const auto start = initial_state(cfg, topo);
  auto state = start;
  for (int t = 0; t < cfg.strategy.iter_max + 1; ++t) state = step(state, cfg, topo);
  for (std::size_t u = 0; u < start.nodes.size(); ++u) {
    if (start.nodes[u].compartment != Compartment::I) continue;
    const auto& sp = start.spread[u];
    CHECK(sp.fanout >= 1);
    CHECK(sp.fanout <= cfg.strategy.k_max);
    CHECK(sp.duration >= 1);
    CHECK(sp.duration <= cfg.strategy.iter_max);
    CHECK(state.spread[u].transmissions == static_cast<std::uint64_t>(sp.fanout));
  }
}

TEST_CASE("battery-inverse transmissions grow as the battery drains") {
  auto cfg = small(Strategy::BatteryInverse, 2);
  cfg.c = 0.0;
  cfg.t_steps = 0;
  const Topology topo = build_topology(cfg.n, cfg.k_topology, 6);
  auto state = initial_state(cfg, topo);
  std::uint32_t u = 0;
  while (state.nodes[u].compartment != Compartment::I) ++u;
  std::uint64_t previous = 0;
  for (int t = 0; t < 40; ++t) {
    const double battery = state.nodes[u].battery;
    const auto next = step(state, cfg, topo);
    const auto sent = next.spread[u].transmissions - state.spread[u].transmissions;
    CHECK(sent == static_cast<std::uint64_t>(std::ceil(cfg.strategy.k * (1.0 - battery))));
    CHECK(sent >= previous);
    previous = sent;
    state = next;
  }
}

TEST_CASE("situation 2 deaths land in R, situations 1&3 in Dead") {
  auto cfg = small(Strategy::MeanField, 4);
  cfg.b = 0.0;
  cfg.c = 0.0;
  cfg.m = 0.2;
  cfg.m_prime = 0.0;
  cfg.strategy.idle_cost = 0.0;
  cfg.t_steps = 10;
  cfg.deaths = DeathWiring::Situation2;
  const auto sit2 = run(cfg);
  CHECK(sit2.rows.back().dead == 0);
  CHECK(sit2.rows.back().r > 0);
  CHECK(sit2.rows.back().i == sit2.rows.front().i);

  cfg.deaths = DeathWiring::Situations13;
  cfg.m_prime = 0.3;
  const auto sit13 = run(cfg);
  CHECK(sit13.rows.back().r == 0);
  CHECK(sit13.rows.back().dead > 0);
  CHECK(sit13.rows.back().i < sit13.rows.front().i);
}

TEST_CASE("runs are deterministic and independent of thread count") {
  std::vector<AbmConfig> configs;
  for (auto kind : kAll) {
    for (std::uint64_t seed : {1, 2, 3}) configs.push_back(small(kind, seed));
  }
  const auto serial = run_all(configs, 1);
  const auto parallel = run_all(configs, 4);
  REQUIRE(serial.size() == configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    CHECK(serial[k].rows == parallel[k].rows);
    CHECK(serial[k].rows == run(configs[k]).rows);
  }
  CHECK(run(small(Strategy::MeanField, 1)).rows != run(small(Strategy::MeanField, 2)).rows);
}

TEST_CASE("run_all propagates failures") {
  std::vector<AbmConfig> configs(3, small(Strategy::MeanField));
  configs[1].c = -1.0;
  CHECK_THROWS_AS(run_all(configs, 2), ValidationError);
}

TEST_CASE("mean-field split at the Fig. 9 settings") {
  AbmConfig cfg;
  cfg.b = 0.001;
  cfg.c = 0.9;
  const auto sub = ensemble_mean(cfg, 4, 1);
  for (const auto& row : sub) CHECK(row.i <= 1000.0);

  cfg.b = 0.5;
  cfg.c = 0.1;
  const auto sup = ensemble_mean(cfg, 4, 1);
  const auto peak = std::max_element(sup.begin(), sup.end(), [](auto& a, auto& b) { return a.i < b.i; });
  CHECK(peak->i >= 3000.0);
  CHECK(peak->t > 0);
}

TEST_CASE("csv output") {
  auto cfg = small(Strategy::MeanField);
  cfg.t_steps = 2;
  std::ostringstream out;
  write_csv(out, run(cfg));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,s,i,r,dead,mean_battery");
  std::getline(in, line);
  CHECK(line == "0,1800,200,0,0,1");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("summary picks the earliest peak") {
  AbmResult res;
  res.rows = {{0, 5, 3, 0, 0, 1.0}, {1, 3, 5, 0, 0, 0.9}, {2, 1, 5, 2, 0, 0.8}, {3, 1, 2, 5, 0, 0.7}};
  const auto s = summarize(res);
  CHECK(s.peak_i == 5);
  CHECK(s.t_peak == 1);
  CHECK(s.final_r == 5);
  CHECK(s.final_mean_battery == 0.7);
}
