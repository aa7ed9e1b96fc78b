#include "presets.hpp"

#include <array>
#include <chrono>
#include <sstream>

#include "sirsurv/abm.hpp"
#include "sirsurv/analytics.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/io_config.hpp"
#include "sirsurv/numfmt.hpp"
#include "sirsurv/ode_engine.hpp"
#include "sirsurv/version.hpp"

namespace sirsurv::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::array<PresetInfo, 13> kPresets = {{
    {"fig2", "classic SIR, b=0.4 c=0.15, s(0)=0.9 i(0)=0.1"},
    {"fig3", "classic phase space (s, i) with F(s, i) along a fan of initial conditions"},
    {"fig5", "phase space with natural death, situation 2 and situations 1&3 (m=0.01)"},
    {"fig6", "situations 1&3 evolution, b=0.4 c=0.15 m=0.01 m'=0.02"},
    {"fig8", "birth-death model at R0 = 3.75 (l=0.015)"},
    {"fig9a", "mean-field ABM, n=10000, b=0.001 c=0.9 (subcritical)"},
    {"fig9b", "mean-field ABM, n=10000, b=0.5 c=0.1 (supercritical)"},
    {"fig10a", "mean-field ABM with situation 2 deaths, b=0.2 c=0.15 m=0.01"},
    {"fig10b", "mean-field ABM with situations 1&3 deaths, b=0.23 c=0.01 m=0.01 m'=0.02"},
    {"fig11a", "k-neighbour forwarding, k=1"},
    {"fig11b", "k-neighbour forwarding, k=4"},
    {"fig12a", "random fan-out forwarding, k_max=8 iter_max=5"},
    {"fig12b", "forwarding inversely proportional to battery, k=4"},
}};

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

io::OdeRunConfig fraction_run(ModelVariant variant, double b, double c, double t_end) {
  io::OdeRunConfig cfg;
  cfg.variant = variant;
  cfg.b = b;
  cfg.c = c;
  cfg.fractions = true;
  cfg.n = 1.0;
  cfg.s0 = 0.9;
  cfg.i0 = 0.1;
  cfg.t_end = t_end;
  return cfg;
}

PresetResult ode_preset(std::string_view name, const io::OdeRunConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const auto traj = ode::integrate(cfg.variant, io::model_params(cfg), io::initial_state(cfg), cfg.t_end, cfg.dt);
  io::RunManifest manifest{std::string(kVersion), "repro " + std::string(name), io::to_json(io::RunConfig{cfg}), {}, {}, 0.0};
  manifest.wall_seconds = elapsed_since(start);

  PresetResult res;
  res.files = io::write_results(traj, manifest, out_dir);
  const auto peak = ode::peak_informed(traj);
  const auto last = ode::final_state(traj);
  std::ostringstream line;
  line << name << ": peak i = " << format_double(peak.i) << " at t = " << format_double(peak.t) << "; final (s, i, r) = ("
       << format_double(last.s) << ", " << format_double(last.i) << ", " << format_double(last.r) << ")";
  if (cfg.variant == ModelVariant::BirthDeath) {
    const auto eq = analytics::endemic_equilibrium(io::model_params(cfg));
    line << "; equilibrium (" << format_double(eq.s) << ", " << format_double(eq.i) << ", " << format_double(eq.r) << ")";
  }
  res.summary = line.str();
  return res;
}

struct FanCurve {
  std::string label;
  ModelVariant variant;
  ModelParams params;
};

// Trajectories from initial points on s + i = 1, thinned to every 0.1 time units.
PresetResult phase_preset(std::string_view name, const std::vector<FanCurve>& curves, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::array<double, 9> kInformed = {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
  constexpr double kHorizon = 100.0;
  constexpr std::size_t kThin = 10;

  std::ostringstream csv;
  csv << "curve,t,s,i,f\n";
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& curve : curves) {
    for (double i0 : kInformed) {
      const auto traj = ode::integrate(curve.variant, curve.params, {1.0 - i0, i0, 0.0, 0.0}, kHorizon);
      const std::string label = curve.label + "_i0=" + format_double(i0);
      for (std::size_t k = 0; k < traj.size(); k += kThin) {
        const auto& x = traj[k];
        csv << label << ',' << format_double(x.t) << ',' << format_double(x.s) << ',' << format_double(x.i) << ',';
        if (curve.variant == ModelVariant::Classic && x.s > 0.0) {
          csv << format_double(analytics::conserved_quantity(curve.params, x.s, x.i));
        }
        csv << '\n';
      }
    }
    runs.push_back({{"curve", curve.label},
                    {"variant", to_string(curve.variant)},
                    {"b", curve.params.b},
                    {"c", curve.params.c},
                    {"m", curve.params.m},
                    {"m_prime", curve.params.m_prime}});
  }

  io::RunManifest manifest{std::string(kVersion), "repro " + std::string(name),
                           {{"curves", runs}, {"i0", kInformed}, {"t_end", kHorizon}, {"dt", ode::kDefaultDt}},
                           {}, {"phase.csv"}, 0.0};
  PresetResult res;
  res.files.push_back(io::write_text(out_dir, "phase.csv", csv.str()));
  manifest.wall_seconds = elapsed_since(start);
  res.files.push_back(io::write_manifest(manifest, out_dir));
  res.summary = std::string(name) + ": " + std::to_string(curves.size() * kInformed.size()) + " phase curves";
  return res;
}

abm::AbmConfig paper_network(double b, double c, std::uint64_t seed) {
  abm::AbmConfig cfg;
  cfg.n = 10000;
  cfg.init_i_fraction = 0.1;
  cfg.b = b;
  cfg.c = c;
  cfg.t_steps = 30;
  cfg.seed = seed;
  return cfg;
}

PresetResult abm_preset(std::string_view name, const abm::AbmConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = abm::run(cfg);
  io::RunManifest manifest{std::string(kVersion), "repro " + std::string(name), io::to_json(io::RunConfig{cfg}),
                           {cfg.seed}, {}, 0.0};
  manifest.wall_seconds = elapsed_since(start);

  PresetResult res;
  res.files = io::write_results(result, manifest, out_dir);
  const auto sum = abm::summarize(result);
  std::ostringstream line;
  line << name << ": peak I = " << sum.peak_i << " at t = " << sum.t_peak << "; final S/I/R/dead = " << sum.final_s
       << '/' << sum.final_i << '/' << sum.final_r << '/' << sum.final_dead
       << "; mean battery = " << format_double(sum.final_mean_battery);
  res.summary = line.str();
  return res;
}

abm::AbmConfig forwarding(abm::Strategy kind, int k, std::uint64_t seed) {
  auto cfg = paper_network(0.0, 0.1, seed);
  cfg.strategy.kind = kind;
  cfg.strategy.k = k;
  return cfg;
}

}  // namespace

std::span<const PresetInfo> presets() { return kPresets; }

PresetResult run_preset(std::string_view name, const fs::path& out_dir, const PresetOptions& opt) {
  if (name == "fig2") return ode_preset(name, fraction_run(ModelVariant::Classic, 0.4, 0.15, 100.0), out_dir);
  if (name == "fig3") {
    return phase_preset(name, {{"classic", ModelVariant::Classic, {0.4, 0.15, 0.0, 0.0, 0.0, 1.0}}}, out_dir);
  }
  if (name == "fig5") {
    return phase_preset(name,
                        {{"situation2", ModelVariant::DeathSituation2, {0.4, 0.15, 0.01, 0.0, 0.0, 1.0}},
                         {"situations13", ModelVariant::DeathSituations13, {0.4, 0.15, 0.01, 0.02, 0.0, 1.0}}},
                        out_dir);
  }
  if (name == "fig6") {
    auto cfg = fraction_run(ModelVariant::DeathSituations13, 0.4, 0.15, 200.0);
    cfg.m = 0.01;
    cfg.m_prime = 0.02;
    return ode_preset(name, cfg, out_dir);
  }
  if (name == "fig8") {
    auto cfg = fraction_run(ModelVariant::BirthDeath, 0.4, 0.15, 1000.0);
    cfg.m = 0.01;
    cfg.l = 0.015;
    return ode_preset(name, cfg, out_dir);
  }
  if (name == "fig9a") return abm_preset(name, paper_network(0.001, 0.9, opt.seed), out_dir);
  if (name == "fig9b") return abm_preset(name, paper_network(0.5, 0.1, opt.seed), out_dir);
  if (name == "fig10a") {
    auto cfg = paper_network(0.2, 0.15, opt.seed);
    cfg.deaths = abm::DeathWiring::Situation2;
    cfg.m = 0.01;
    return abm_preset(name, cfg, out_dir);
  }
  if (name == "fig10b") {
    auto cfg = paper_network(0.23, 0.01, opt.seed);
    cfg.deaths = abm::DeathWiring::Situations13;
    cfg.m = 0.01;
    cfg.m_prime = 0.02;
    return abm_preset(name, cfg, out_dir);
  }
  if (name == "fig11a") return abm_preset(name, forwarding(abm::Strategy::KNeighbor, 1, opt.seed), out_dir);
  if (name == "fig11b") return abm_preset(name, forwarding(abm::Strategy::KNeighbor, 4, opt.seed), out_dir);
  if (name == "fig12a") return abm_preset(name, forwarding(abm::Strategy::RandomFanout, 4, opt.seed), out_dir);
  if (name == "fig12b") return abm_preset(name, forwarding(abm::Strategy::BatteryInverse, 4, opt.seed), out_dir);
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace sirsurv::cli
