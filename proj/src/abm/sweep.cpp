#include <array>
#include <cmath>
#include <ostream>

#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/numfmt.hpp"

namespace sirsurv::abm {

namespace {

constexpr std::array<std::string_view, 16> kFields = {
    "n",       "init_i_fraction", "b",        "c",       "m",         "m_prime",   "t_steps", "seed",
    "k",       "k_max",           "iter_max", "tx_cost", "idle_cost", "tau",       "k_topology", "initial_battery",
};

int as_int(std::string_view name, double v) {
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 2e9) {
    throw ValidationError(std::string(name), "expects an integer value");
  }
  return static_cast<int>(v);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ":") + p;
  return out;
}

}  // namespace

std::span<const std::string_view> sweepable_fields() { return kFields; }

void set_field(AbmConfig& cfg, std::string_view name, double v) {
  if (name == "n") cfg.n = as_int(name, v);
  else if (name == "init_i_fraction") cfg.init_i_fraction = v;
  else if (name == "b") cfg.b = v;
  else if (name == "c") cfg.c = v;
  else if (name == "m") cfg.m = v;
  else if (name == "m_prime") cfg.m_prime = v;
  else if (name == "t_steps") cfg.t_steps = as_int(name, v);
  else if (name == "seed") {
    if (v < 0) throw ValidationError("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(as_int(name, v));
  }
  else if (name == "k") cfg.strategy.k = as_int(name, v);
  else if (name == "k_max") cfg.strategy.k_max = as_int(name, v);
  else if (name == "iter_max") cfg.strategy.iter_max = as_int(name, v);
  else if (name == "tx_cost") cfg.strategy.tx_cost = v;
  else if (name == "idle_cost") cfg.strategy.idle_cost = v;
  else if (name == "tau") cfg.strategy.tau = v;
  else if (name == "k_topology") cfg.k_topology = as_int(name, v);
  else if (name == "initial_battery") cfg.initial_battery = v;
  else throw ValidationError("axis", "unknown sweep axis '" + std::string(name) + "'");
}

SweepTable sweep(const AbmConfig& base, const SweepAxis& axis, int seeds, unsigned threads) {
  if (axis.fields.empty()) throw ValidationError("axis", "names no field");
  if (seeds < 1) throw ValidationError("seeds", "must be >= 1");
  for (const auto& point : axis.points) {
    if (point.size() != axis.fields.size()) {
      throw ValidationError("values", "each point needs one value per axis field");
    }
  }

  std::vector<AbmConfig> configs;
  configs.reserve(axis.points.size() * static_cast<std::size_t>(seeds));
  for (const auto& point : axis.points) {
    AbmConfig cfg = base;
    for (std::size_t f = 0; f < point.size(); ++f) set_field(cfg, axis.fields[f], point[f]);
    const std::uint64_t first_seed = cfg.seed;
    for (int s = 0; s < seeds; ++s) {
      cfg.seed = first_seed + static_cast<std::uint64_t>(s);
      configs.push_back(cfg);
    }
  }
  const auto results = run_all(configs, threads);

  SweepTable table{axis.fields, {}};
  std::size_t k = 0;
  for (const auto& point : axis.points) {
    RunSummary mean;
    for (int s = 0; s < seeds; ++s, ++k) {
      const auto sum = summarize(results[k]);
      table.rows.push_back({point, static_cast<std::int64_t>(configs[k].seed), sum});
      mean.peak_i += sum.peak_i;
      mean.t_peak += sum.t_peak;
      mean.final_s += sum.final_s;
      mean.final_i += sum.final_i;
      mean.final_r += sum.final_r;
      mean.final_dead += sum.final_dead;
      mean.final_mean_battery += sum.final_mean_battery;
    }
    for (double* v : {&mean.peak_i, &mean.t_peak, &mean.final_s, &mean.final_i, &mean.final_r,
                      &mean.final_dead, &mean.final_mean_battery}) {
      *v /= seeds;
    }
    table.rows.push_back({point, -1, mean});
  }
  return table;
}

SweepTable sweep(const AbmConfig& base, const std::string& axis, std::span<const double> values, int seeds,
                 unsigned threads) {
  SweepAxis ax{{axis}, {}};
  for (double v : values) ax.points.push_back({v});
  return sweep(base, ax, seeds, threads);
}

void write_csv(std::ostream& out, const SweepTable& table) {
  out << "axis,value,seed,peak_i,t_peak,final_s,final_i,final_r,final_dead,final_mean_battery\n";
  const auto axis = join(table.fields);
  for (const auto& row : table.rows) {
    std::vector<std::string> vals;
    for (double v : row.values) vals.push_back(format_double(v));
    const auto& s = row.summary;
    out << axis << ',' << join(vals) << ',' << row.seed;
    for (double v : {s.peak_i, s.t_peak, s.final_s, s.final_i, s.final_r, s.final_dead, s.final_mean_battery}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

}  // namespace sirsurv::abm
