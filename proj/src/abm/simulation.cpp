#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/numfmt.hpp"
#include "sirsurv/random.hpp"

namespace sirsurv::abm {

namespace {

// Purposes for keyed random draws.
enum : std::uint64_t {
  kInfect = 1,
  kRecover,
  kDeath,
  kAccept,
  kFanout,
  kDuration,
  kShuffle,
  kPositions,
};

// Live neighbours in distance order, at most `limit` of them.
std::vector<std::uint32_t> live_nearest(const AbmState& state, const Topology& topo, std::uint32_t u,
                                        std::size_t limit) {
  std::vector<std::uint32_t> out;
  if (topo.neighbors.empty()) return out;
  for (std::uint32_t v : topo.neighbors[u]) {
    if (out.size() >= limit) break;
    if (state.nodes[v].compartment != Compartment::Dead) out.push_back(v);
  }
  return out;
}

// Targets `u` messages this step under the configured strategy; updates the
// sender's bookkeeping in `spread`.
std::vector<std::uint32_t> targets_for(const AbmState& state, const AbmConfig& cfg, const Topology& topo,
                                       std::uint32_t u, SpreadState& spread) {
  const auto& strat = cfg.strategy;
  switch (strat.kind) {
    case Strategy::MeanField:
      return {};

    case Strategy::KNeighbor: {
      if (!spread.pending_broadcast) return {};
      spread.pending_broadcast = false;
      return live_nearest(state, topo, u, static_cast<std::size_t>(strat.k));
    }

    case Strategy::RandomFanout: {
      if (spread.steps_sent >= spread.duration) return {};
      const auto pool = live_nearest(state, topo, u, static_cast<std::size_t>(spread.fanout));
      // Step j of D sends messages floor(j F / D) .. floor((j+1) F / D) - 1.
      const int j = spread.steps_sent++;
      const auto lo = static_cast<std::size_t>(j * spread.fanout / spread.duration);
      const auto hi = static_cast<std::size_t>((j + 1) * spread.fanout / spread.duration);
      std::vector<std::uint32_t> out;
      for (std::size_t slot = lo; slot < hi && slot < pool.size(); ++slot) out.push_back(pool[slot]);
      return out;
    }

    case Strategy::BatteryInverse: {
      const double battery = state.nodes[u].battery;
      const int count = static_cast<int>(std::ceil(strat.k * (1.0 - battery)));
      const auto pool = live_nearest(state, topo, u, static_cast<std::size_t>(strat.k));
      if (count <= 0 || pool.empty()) return {};
      std::vector<std::uint32_t> out;
      out.reserve(static_cast<std::size_t>(count));
      for (int j = 0; j < count; ++j) out.push_back(pool[(spread.cursor + j) % pool.size()]);
      spread.cursor += static_cast<std::uint32_t>(count);
      return out;
    }
  }
  return {};
}

void enter_informed(const AbmConfig& cfg, int t, std::uint32_t u, SpreadState& spread) {
  spread.pending_broadcast = true;
  spread.steps_sent = 0;
  spread.cursor = 0;
  if (cfg.strategy.kind == Strategy::RandomFanout) {
    const auto draw = [&](std::uint64_t purpose, int hi) {
      const double x = rng::uniform(cfg.seed, static_cast<std::uint64_t>(t), u, purpose);
      return 1 + std::min(hi - 1, static_cast<int>(x * hi));
    };
    spread.fanout = draw(kFanout, cfg.strategy.k_max);
    spread.duration = draw(kDuration, cfg.strategy.iter_max);
  }
}

std::uint64_t topology_seed(std::uint64_t seed) { return rng::splitmix64(seed ^ (kPositions << 48)); }

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::MeanField: return "mean-field";
    case Strategy::KNeighbor: return "k-neighbor";
    case Strategy::RandomFanout: return "random-fanout";
    case Strategy::BatteryInverse: return "battery-inverse";
  }
  return "unknown";
}

std::string_view to_string(DeathWiring w) {
  switch (w) {
    case DeathWiring::None: return "none";
    case DeathWiring::Situation2: return "situation2";
    case DeathWiring::Situations13: return "situations13";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::MeanField, Strategy::KNeighbor, Strategy::RandomFanout, Strategy::BatteryInverse}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("strategy", "unknown strategy '" + std::string(name) + "'");
}

DeathWiring parse_death_wiring(std::string_view name) {
  for (auto w : {DeathWiring::None, DeathWiring::Situation2, DeathWiring::Situations13}) {
    if (to_string(w) == name) return w;
  }
  throw ValidationError("deaths", "unknown death wiring '" + std::string(name) + "'");
}

bool needs_topology(Strategy s) { return s != Strategy::MeanField; }

void validate(const AbmConfig& cfg) {
  const auto probability = [](const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ValidationError(field, "must lie in [0, 1]");
  };
  const auto non_negative = [](const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(field, "must be finite and >= 0");
  };

  if (cfg.n < 1) throw ValidationError("n", "must be >= 1");
  probability("init_i_fraction", cfg.init_i_fraction);
  non_negative("b", cfg.b);
  probability("c", cfg.c);
  probability("m", cfg.m);
  probability("m_prime", cfg.m_prime);
  if (cfg.t_steps < 0) throw ValidationError("t_steps", "must be >= 0");
  if (!std::isfinite(cfg.initial_battery) || cfg.initial_battery <= 0.0 || cfg.initial_battery > 1.0) {
    throw ValidationError("initial_battery", "must lie in (0, 1]");
  }

  const auto& s = cfg.strategy;
  if (s.k < 1) throw ValidationError("k", "must be >= 1");
  if (s.k_max < 1) throw ValidationError("k_max", "must be >= 1");
  if (s.iter_max < 1) throw ValidationError("iter_max", "must be >= 1");
  non_negative("tx_cost", s.tx_cost);
  non_negative("idle_cost", s.idle_cost);
  probability("tau", s.tau);

  if (needs_topology(s.kind)) {
    if (cfg.k_topology < 1) throw ValidationError("k_topology", "must be >= 1");
    if (cfg.n < cfg.k_topology + 1) throw ValidationError("n", "needs at least k_topology + 1 nodes");
  }
}

AbmState initial_state(const AbmConfig& cfg, const Topology& topo) {
  const auto n = static_cast<std::size_t>(cfg.n);
  AbmState state;
  state.nodes.resize(n);
  state.spread.resize(n);

  const auto positions = topo.positions.size() == n ? topo.positions : scatter_positions(cfg.n, topology_seed(cfg.seed));
  for (std::uint32_t id = 0; id < n; ++id) {
    state.nodes[id] = Node{id, Compartment::S, cfg.initial_battery, positions[id]};
  }

  // Fisher-Yates; the first `informed` ids of the permutation start in I.
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t id = 0; id < n; ++id) order[id] = id;
  rng::Stream stream(rng::key(cfg.seed, 0, 0, kShuffle));
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[stream.below(k)]);

  const auto informed = static_cast<std::size_t>(std::llround(cfg.init_i_fraction * static_cast<double>(n)));
  for (std::size_t k = 0; k < std::min(informed, n); ++k) {
    const auto u = order[k];
    state.nodes[u].compartment = Compartment::I;
    enter_informed(cfg, 0, u, state.spread[u]);
  }
  return state;
}

AbmState step(const AbmState& pre, const AbmConfig& cfg, const Topology& topo) {
  const std::size_t n = pre.nodes.size();
  if (needs_topology(cfg.strategy.kind) && topo.neighbors.size() != n) {
    throw InvalidStateError("strategy needs a topology matching the node count");
  }
  AbmState next = pre;
  next.t = pre.t + 1;
  const auto t = static_cast<std::uint64_t>(next.t);

  std::size_t informed = 0;
  for (const auto& node : pre.nodes) informed += node.compartment == Compartment::I;
  const double p_infect = std::min(1.0, cfg.b * static_cast<double>(informed) / static_cast<double>(n));

  // Transmissions: senders are the nodes informed before this step.
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::uint32_t> sent(n, 0);
  if (cfg.strategy.kind != Strategy::MeanField) {
    for (std::uint32_t u = 0; u < n; ++u) {
      if (pre.nodes[u].compartment != Compartment::I) continue;
      const auto targets = targets_for(pre, cfg, topo, u, next.spread[u]);
      sent[u] = static_cast<std::uint32_t>(targets.size());
      for (std::uint32_t slot = 0; slot < targets.size(); ++slot) {
        const auto v = targets[slot];
        if (pre.nodes[v].compartment == Compartment::S &&
            rng::uniform(cfg.seed, t, u, kAccept, slot) < cfg.strategy.tau) {
          reached[v] = 1;
        }
      }
    }
  }

  const bool s_r_die = cfg.deaths != DeathWiring::None;
  const bool situations13 = cfg.deaths == DeathWiring::Situations13;
  for (std::uint32_t u = 0; u < n; ++u) {
    auto& node = next.nodes[u];
    switch (pre.nodes[u].compartment) {
      case Compartment::S: {
        if (s_r_die && rng::uniform(cfg.seed, t, u, kDeath) < cfg.m) {
          node.compartment = situations13 ? Compartment::Dead : Compartment::R;
        } else if (cfg.strategy.kind == Strategy::MeanField ? rng::uniform(cfg.seed, t, u, kInfect) < p_infect
                                                             : reached[u] != 0) {
          node.compartment = Compartment::I;
          enter_informed(cfg, next.t, u, next.spread[u]);
        }
        break;
      }
      case Compartment::I:
        if (situations13 && rng::uniform(cfg.seed, t, u, kDeath) < cfg.m_prime) {
          node.compartment = Compartment::Dead;
        } else if (rng::uniform(cfg.seed, t, u, kRecover) < cfg.c) {
          node.compartment = Compartment::R;
        }
        break;
      case Compartment::R:
        if (situations13 && rng::uniform(cfg.seed, t, u, kDeath) < cfg.m) node.compartment = Compartment::Dead;
        break;
      case Compartment::Dead:
        break;
    }
  }

  // Energy: everyone alive before the step idles; senders pay per message.
  for (std::uint32_t u = 0; u < n; ++u) {
    if (pre.nodes[u].compartment == Compartment::Dead) continue;
    auto& node = next.nodes[u];
    next.spread[u].transmissions += sent[u];
    node.battery -= cfg.strategy.idle_cost + sent[u] * cfg.strategy.tx_cost;
    if (node.battery <= 0.0) {
      node.battery = 0.0;
      node.compartment = Compartment::Dead;
    }
  }
  return next;
}

StepCounts count(const AbmState& state) {
  StepCounts c;
  c.t = state.t;
  double battery = 0.0;
  for (const auto& node : state.nodes) {
    switch (node.compartment) {
      case Compartment::S: ++c.s; break;
      case Compartment::I: ++c.i; break;
      case Compartment::R: ++c.r; break;
      case Compartment::Dead: ++c.dead; break;
    }
    battery += node.battery;
  }
  c.mean_battery = state.nodes.empty() ? 0.0 : battery / static_cast<double>(state.nodes.size());
  return c;
}

AbmResult run(const AbmConfig& cfg) {
  validate(cfg);
  const Topology topo = needs_topology(cfg.strategy.kind) ? build_topology(cfg.n, cfg.k_topology, topology_seed(cfg.seed))
                                                          : Topology{};
  AbmResult result{cfg, {}};
  result.rows.reserve(static_cast<std::size_t>(cfg.t_steps) + 1);
  AbmState state = initial_state(cfg, topo);
  result.rows.push_back(count(state));
  for (int k = 0; k < cfg.t_steps; ++k) {
    state = step(state, cfg, topo);
    result.rows.push_back(count(state));
  }
  return result;
}

void write_csv(std::ostream& out, const AbmResult& result) {
  out << "t,s,i,r,dead,mean_battery\n";
  for (const auto& row : result.rows) {
    out << row.t << ',' << row.s << ',' << row.i << ',' << row.r << ',' << row.dead << ','
        << format_double(row.mean_battery) << '\n';
  }
}

std::vector<AbmResult> run_all(std::span<const AbmConfig> configs, unsigned threads) {
  for (const auto& cfg : configs) validate(cfg);
  std::vector<AbmResult> results(configs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, configs.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t k = next++; k < configs.size() && !failed; k = next++) {
      try {
        results[k] = run(configs[k]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

RunSummary summarize(const AbmResult& result) {
  RunSummary s;
  if (result.rows.empty()) return s;
  const auto peak = std::max_element(result.rows.begin(), result.rows.end(),
                                     [](const auto& a, const auto& b) { return a.i < b.i; });
  s.peak_i = peak->i;
  s.t_peak = peak->t;
  const auto& last = result.rows.back();
  s.final_s = last.s;
  s.final_i = last.i;
  s.final_r = last.r;
  s.final_dead = last.dead;
  s.final_mean_battery = last.mean_battery;
  return s;
}

std::vector<EnsembleRow> ensemble_mean(const AbmConfig& base, int seeds, unsigned threads) {
  if (seeds < 1) throw ValidationError("seeds", "must be >= 1");
  std::vector<AbmConfig> configs(static_cast<std::size_t>(seeds), base);
  for (int k = 0; k < seeds; ++k) configs[k].seed = base.seed + static_cast<std::uint64_t>(k);
  const auto results = run_all(configs, threads);

  std::vector<EnsembleRow> mean(results.front().rows.size());
  for (const auto& res : results) {
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const auto& row = res.rows[k];
      mean[k].t = row.t;
      mean[k].s += row.s;
      mean[k].i += row.i;
      mean[k].r += row.r;
      mean[k].dead += row.dead;
      mean[k].mean_battery += row.mean_battery;
    }
  }
  const double w = 1.0 / seeds;
  for (auto& row : mean) {
    row.s *= w;
    row.i *= w;
    row.r *= w;
    row.dead *= w;
    row.mean_battery *= w;
  }
  return mean;
}

}  // namespace sirsurv::abm
