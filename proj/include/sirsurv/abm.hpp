#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sirsurv::abm {

enum class Compartment : std::uint8_t { S, I, R, Dead };

/// How informed nodes push the datum to others.
enum class Strategy {
  MeanField,       ///< S nodes are informed with probability min(1, b * I / n), no topology
  KNeighbor,       ///< one burst to the k nearest live neighbours, the step after being informed
  RandomFanout,    ///< F ~ U{1..k_max} nearest neighbours spread over D ~ U{1..iter_max} steps
  BatteryInverse,  ///< every step, ceil(k * (1 - battery)) messages to the k nearest, round robin
};

/// Where natural deaths go.
enum class DeathWiring {
  None,
  Situation2,    ///< R holds dead nodes: S dies into R at m
  Situations13,  ///< R is alive: S, R die at m and I at m' into Dead
};

std::string_view to_string(Strategy s);
std::string_view to_string(DeathWiring w);
Strategy parse_strategy(std::string_view name);
DeathWiring parse_death_wiring(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Node {
  std::uint32_t id = 0;
  Compartment compartment = Compartment::S;
  double battery = 1.0;
  Point position;
};

struct StrategyConfig {
  Strategy kind = Strategy::MeanField;
  int k = 4;
  int k_max = 8;
  int iter_max = 5;
  double tx_cost = 0.01;
  double idle_cost = 0.001;
  double tau = 0.5;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// b, c, m and m' are per-step probabilities. b follows the fraction
/// convention: an S node is informed with probability min(1, b * I_count / n).
struct AbmConfig {
  int n = 10000;
  double init_i_fraction = 0.1;
  double b = 0.5;
  double c = 0.1;
  double m = 0.0;
  double m_prime = 0.0;
  int t_steps = 30;
  std::uint64_t seed = 1;
  StrategyConfig strategy;
  DeathWiring deaths = DeathWiring::None;
  int k_topology = 8;
  double initial_battery = 1.0;

  friend bool operator==(const AbmConfig&, const AbmConfig&) = default;
};

/// Throws ValidationError naming the offending field.
void validate(const AbmConfig& config);

bool needs_topology(Strategy s);

/// Unit-square geometric graph. Neighbour lists hold the k nearest nodes of
/// each node plus every node that chose it, sorted by (distance, id).
struct Topology {
  std::vector<Point> positions;
  std::vector<std::vector<std::uint32_t>> neighbors;
  int k = 0;

  std::size_t size() const noexcept { return positions.size(); }
};

/// `n` uniform points in the unit square, deterministic in `seed`.
std::vector<Point> scatter_positions(int n, std::uint64_t seed);

/// Symmetrized k-nearest-neighbour graph over scatter_positions(n, seed).
/// Throws ValidationError when n < k_topology + 1.
Topology build_topology(int n, int k_topology, std::uint64_t seed);
Topology build_topology(std::vector<Point> positions, int k_topology);

/// Per-node forwarding bookkeeping.
struct SpreadState {
  bool pending_broadcast = false;  // KNeighbor burst not sent yet
  int fanout = 0;                  // RandomFanout F
  int duration = 0;                // RandomFanout D
  int steps_sent = 0;
  std::uint32_t cursor = 0;        // BatteryInverse round robin position
  std::uint64_t transmissions = 0;
};

struct AbmState {
  int t = 0;
  std::vector<Node> nodes;
  std::vector<SpreadState> spread;
};

/// Seeded initial assignment: exactly round(init_i_fraction * n) nodes in I.
AbmState initial_state(const AbmConfig& config, const Topology& topology);

/// One synchronous step: every decision reads `state`, then all updates are
/// applied together. `topology` may be empty for MeanField.
AbmState step(const AbmState& state, const AbmConfig& config, const Topology& topology);

struct StepCounts {
  int t = 0;
  int s = 0;
  int i = 0;
  int r = 0;
  int dead = 0;
  double mean_battery = 0.0;

  friend bool operator==(const StepCounts&, const StepCounts&) = default;
};

StepCounts count(const AbmState& state);

struct AbmResult {
  AbmConfig config;
  std::vector<StepCounts> rows;  // t = 0 .. t_steps
};

/// t_steps synchronous steps. Deterministic in the config (seed included).
AbmResult run(const AbmConfig& config);

/// `t,s,i,r,dead,mean_battery`.
void write_csv(std::ostream& out, const AbmResult& result);

/// Runs every config, `threads` at a time (0 = hardware concurrency). Output
/// order matches input order whatever the scheduling.
std::vector<AbmResult> run_all(std::span<const AbmConfig> configs, unsigned threads = 0);

struct RunSummary {
  double peak_i = 0.0;
  double t_peak = 0.0;
  double final_s = 0.0;
  double final_i = 0.0;
  double final_r = 0.0;
  double final_dead = 0.0;
  double final_mean_battery = 0.0;
};

RunSummary summarize(const AbmResult& result);

/// Per-step averages over `seeds` runs with seeds base.seed, base.seed+1, ...
struct EnsembleRow {
  int t = 0;
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double dead = 0.0;
  double mean_battery = 0.0;
};

std::vector<EnsembleRow> ensemble_mean(const AbmConfig& base, int seeds, unsigned threads = 0);

/// Names accepted as sweep axes.
std::span<const std::string_view> sweepable_fields();

/// Sets a numeric field by name. Throws ValidationError for unknown names.
void set_field(AbmConfig& config, std::string_view name, double value);

/// A sweep axis may move several fields together, e.g. the (b, c) pairs.
struct SweepAxis {
  std::vector<std::string> fields;
  std::vector<std::vector<double>> points;  // one value per field
};

struct SweepRow {
  std::vector<double> values;
  std::int64_t seed = 0;  // -1 marks the across-seed mean for this point
  RunSummary summary;
};

struct SweepTable {
  std::vector<std::string> fields;
  std::vector<SweepRow> rows;
};

/// Cross product of points x seeds. Rows are ordered by point, then seed,
/// with each point's aggregate row (seed = -1) after its seeds.
SweepTable sweep(const AbmConfig& base, const SweepAxis& axis, int seeds, unsigned threads = 0);
SweepTable sweep(const AbmConfig& base, const std::string& axis, std::span<const double> values,
                 int seeds, unsigned threads = 0);

/// `axis,value,seed,peak_i,t_peak,final_s,final_i,final_r,final_dead,final_mean_battery`.
/// Multi-field axes print as `b:c` with values `0.5:0.1`.
void write_csv(std::ostream& out, const SweepTable& table);

}  // namespace sirsurv::abm
