#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "presets.hpp"
#include "sirsurv/abm.hpp"
#include "sirsurv/analytics.hpp"
#include "sirsurv/compare.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/io_config.hpp"
#include "sirsurv/numfmt.hpp"
#include "sirsurv/ode_engine.hpp"
#include "sirsurv/version.hpp"

namespace sirsurv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Kind { Number, Integer, Text };

struct FlagSpec {
  const char* flag;
  const char* pointer;  // JSON pointer into the config object
  Kind kind;
  const char* help;
};

constexpr FlagSpec kOdeFlags[] = {
    {"--variant", "/variant", Kind::Text, "classic | situation2 | situations13 | birth-death"},
    {"--b", "/b", Kind::Number, "contact rate (fraction convention; divided by n in counts)"},
    {"--c", "/c", Kind::Number, "recovery / compromise rate"},
    {"--m", "/m", Kind::Number, "natural death rate"},
    {"--m-prime", "/m_prime", Kind::Number, "death rate of informed nodes (situations 1&3)"},
    {"--l", "/l", Kind::Number, "birth / connection inflow (birth-death)"},
    {"--n", "/n", Kind::Number, "population size (counts convention)"},
    {"--s0", "/s0", Kind::Number, "initial susceptible"},
    {"--i0", "/i0", Kind::Number, "initial informed"},
    {"--r-init", "/r_init", Kind::Number, "initial recovered"},
    {"--t-end", "/t_end", Kind::Number, "integration horizon"},
    {"--dt", "/dt", Kind::Number, "RK4 step"},
};

constexpr FlagSpec kAbmFlags[] = {
    {"--n", "/n", Kind::Integer, "node count"},
    {"--init-i", "/init_i_fraction", Kind::Number, "initially informed fraction"},
    {"--b", "/b", Kind::Number, "mean-field contact probability"},
    {"--c", "/c", Kind::Number, "per-step compromise probability"},
    {"--m", "/m", Kind::Number, "per-step natural death probability"},
    {"--m-prime", "/m_prime", Kind::Number, "per-step death probability of informed nodes"},
    {"--steps", "/t_steps", Kind::Integer, "simulation length"},
    {"--deaths", "/deaths", Kind::Text, "none | situation2 | situations13"},
    {"--k-topology", "/k_topology", Kind::Integer, "k of the k-nearest-neighbour graph"},
    {"--initial-battery", "/initial_battery", Kind::Number, "starting battery level"},
    {"--strategy", "/strategy/kind", Kind::Text, "mean-field | k-neighbor | random-fanout | battery-inverse"},
    {"--k", "/strategy/k", Kind::Integer, "fan-out (k-neighbor, battery-inverse)"},
    {"--k-max", "/strategy/k_max", Kind::Integer, "max fan-out (random-fanout)"},
    {"--iter-max", "/strategy/iter_max", Kind::Integer, "max spread duration (random-fanout)"},
    {"--tau", "/strategy/tau", Kind::Number, "transmissibility"},
    {"--tx-cost", "/strategy/tx_cost", Kind::Number, "battery cost per message"},
    {"--idle-cost", "/strategy/idle_cost", Kind::Number, "battery cost per step"},
};

// Flags whose values are overlaid onto a JSON config before it is parsed.
class Overlay {
public:
  void add(CLI::App& app, std::span<const FlagSpec> specs, std::string prefix = "") {
    for (const auto& spec : specs) {
      auto& slot = values_.emplace_back(Entry{&spec, prefix, std::nullopt});
      app.add_option(spec.flag, slot.value, spec.help);
    }
  }

  void apply(json& j) const {
    for (const auto& e : values_) {
      if (!e.value) continue;
      j[json::json_pointer(e.prefix + e.spec->pointer)] = convert(*e.spec, *e.value);
    }
  }

  // "base.strategy.k" -> "--k"; empty when the field is not a flag.
  std::string flag_for(const std::string& field) const {
    for (const auto& e : values_) {
      std::string dotted = (e.prefix + e.spec->pointer).substr(1);
      std::replace(dotted.begin(), dotted.end(), '/', '.');
      if (dotted == field) return e.spec->flag;
    }
    return {};
  }

private:
  struct Entry {
    const FlagSpec* spec;
    std::string prefix;
    std::optional<std::string> value;
  };

  static json convert(const FlagSpec& spec, const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (spec.kind == Kind::Number) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) throw ValidationError(spec.flag, "expected a number, got '" + text + "'");
      return v;
    }
    if (spec.kind == Kind::Integer) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) throw ValidationError(spec.flag, "expected an integer, got '" + text + "'");
      return v;
    }
    return text;
  }

  std::deque<Entry> values_;
};

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool fractions = false;
  bool json_output = false;
  unsigned threads = 0;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool with_threads) {
  cmd.add_option("--config", f.config, "JSON config or a manifest.json from an earlier run");
  cmd.add_option("--seed", f.seed, "RNG seed");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_flag("--fractions", f.fractions, "magnitudes are population shares and b applies unscaled");
  cmd.add_flag("--json", f.json_output, "machine-readable stdout");
  if (with_threads) cmd.add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

template <class T>
const T& expect(const io::RunConfig& cfg, const char* what) {
  if (const auto* p = std::get_if<T>(&cfg)) return *p;
  throw ValidationError("config", std::string("expected a ") + what + " config");
}

template <class T>
T resolve(const CommonFlags& f, const Overlay& overlay, const char* type, const char* what,
          const std::function<void(json&)>& extra = {}) {
  json j = f.config.empty() ? json{{"type", type}} : io::to_json(io::load_config(f.config));
  if (j.value("type", "") != type) throw ValidationError("config", std::string("expected a ") + what + " config");
  if (f.fractions && std::string(type) == "ode") j["fractions"] = true;
  try {
    overlay.apply(j);
    if (extra) extra(j);
    return expect<T>(io::config_from_json(j), what);
  } catch (const ValidationError& e) {
    const auto flag = overlay.flag_for(e.field());
    if (flag.empty()) throw;
    const std::string msg = e.what();
    throw ValidationError(flag, msg.substr(msg.find(": ") + 2));
  }
}

fs::path out_dir(const CommonFlags& f, const std::string& fallback) {
  return f.out.empty() ? fs::path("sirsurv-out") / fallback : fs::path(f.out);
}

std::string list_paths(const std::vector<fs::path>& paths) {
  std::string out;
  for (const auto& p : paths) out += (out.empty() ? "" : ", ") + p.string();
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::uint64_t> seed_list(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < count; ++k) seeds.push_back(first + static_cast<std::uint64_t>(k));
  return seeds;
}

// "0.5,0.2" or "0.001:0.9,0.5:0.1"
std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> points;
  std::stringstream outer(text);
  std::string item;
  while (std::getline(outer, item, ',')) {
    std::vector<double> point;
    std::stringstream inner(item);
    std::string part;
    while (std::getline(inner, part, ':')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size()) {
        throw ValidationError("--values", "cannot parse '" + part + "'");
      }
      point.push_back(v);
    }
    points.push_back(std::move(point));
  }
  return points;
}

int cmd_ode(const CommonFlags& f, const Overlay& overlay, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = resolve<io::OdeRunConfig>(f, overlay, "ode", "ode");
  const auto traj = ode::integrate(cfg.variant, io::model_params(cfg), io::initial_state(cfg), cfg.t_end, cfg.dt);
  for (const auto& w : traj.warnings()) err << "warning: " << w << '\n';

  io::RunManifest manifest{std::string(kVersion), "ode", io::to_json(io::RunConfig{cfg}), {}, {}, seconds_since(t0)};
  if (f.seed) manifest.seeds.push_back(*f.seed);
  const auto paths = io::write_results(traj, manifest, out_dir(f, "ode"));

  const auto peak = ode::peak_informed(traj);
  const auto last = ode::final_state(traj);
  if (f.json_output) {
    out << json{{"peak_t", peak.t},
                {"peak_i", peak.i},
                {"final", {{"t", last.t}, {"s", last.s}, {"i", last.i}, {"r", last.r}}},
                {"outputs", paths.size() > 0 ? paths[0].string() : ""}}
               .dump()
        << '\n';
  } else {
    out << to_string(cfg.variant) << ": " << traj.size() << " samples, peak i = " << format_double(peak.i)
        << " at t = " << format_double(peak.t) << ", final (s, i, r) = (" << format_double(last.s) << ", "
        << format_double(last.i) << ", " << format_double(last.r) << ")\nwrote " << list_paths(paths) << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const CommonFlags& f, const Overlay& overlay, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = resolve<io::OdeRunConfig>(f, overlay, "ode", "ode");
  for (const auto& w : validate(cfg.variant, io::model_params(cfg))) err << "warning: " << w << '\n';
  const auto report = analytics::classify_outcome(cfg.variant, io::model_params(cfg), cfg.s0, cfg.i0, io::population(cfg));
  const json j = report;
  out << (f.json_output ? j.dump() : j.dump(2)) << '\n';

  if (!f.out.empty()) {
    io::RunManifest manifest{std::string(kVersion), "analyze", io::to_json(io::RunConfig{cfg}), {}, {"report.json"}, 0.0};
    io::write_text(f.out, "report.json", j.dump(2) + "\n");
    manifest.wall_seconds = seconds_since(t0);
    io::write_manifest(manifest, f.out);
  }
  return kExitOk;
}

int cmd_abm(const CommonFlags& f, const Overlay& overlay, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = resolve<abm::AbmConfig>(f, overlay, "abm", "abm", [&](json& j) {
    if (f.seed) j["seed"] = *f.seed;
  });
  const auto result = abm::run(cfg);
  io::RunManifest manifest{std::string(kVersion), "abm", io::to_json(io::RunConfig{cfg}), {cfg.seed}, {}, seconds_since(t0)};
  const auto paths = io::write_results(result, manifest, out_dir(f, "abm"));

  const auto s = abm::summarize(result);
  if (f.json_output) {
    out << json{{"peak_i", s.peak_i},     {"t_peak", s.t_peak},         {"final_s", s.final_s},
                {"final_i", s.final_i},   {"final_r", s.final_r},       {"final_dead", s.final_dead},
                {"final_mean_battery", s.final_mean_battery}, {"outputs", paths[0].string()}}
               .dump()
        << '\n';
  } else {
    out << abm::to_string(cfg.strategy.kind) << ": peak I = " << s.peak_i << " at t = " << s.t_peak
        << ", final S/I/R/dead = " << s.final_s << '/' << s.final_i << '/' << s.final_r << '/' << s.final_dead
        << ", mean battery = " << format_double(s.final_mean_battery) << "\nwrote " << list_paths(paths) << '\n';
  }
  return kExitOk;
}

struct SweepFlags {
  std::string axis;
  std::string values;
  std::optional<int> seeds;
};

int cmd_sweep(const CommonFlags& f, const Overlay& overlay, const SweepFlags& sf, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = resolve<io::SweepConfig>(f, overlay, "sweep", "sweep", [&](json& j) {
    if (!sf.axis.empty()) {
      std::vector<std::string> fields;
      std::stringstream ss(sf.axis);
      for (std::string part; std::getline(ss, part, ':');) fields.push_back(part);
      j["axis"] = fields;
    }
    if (!sf.values.empty()) j["values"] = parse_points(sf.values);
    if (sf.seeds) j["seeds"] = *sf.seeds;
    if (f.seed) j["base"]["seed"] = *f.seed;
    if (!j.contains("axis")) throw ValidationError("--axis", "is required");
    if (!j.contains("values")) throw ValidationError("--values", "is required");
  });
  const auto table = abm::sweep(cfg.base, cfg.axis, cfg.seeds, f.threads);
  io::RunManifest manifest{std::string(kVersion), "sweep", io::to_json(io::RunConfig{cfg}),
                           seed_list(cfg.base.seed, cfg.seeds), {}, seconds_since(t0)};
  const auto paths = io::write_results(table, manifest, out_dir(f, "sweep"));

  if (f.json_output) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      if (row.seed != -1) continue;
      rows.push_back({{"values", row.values},
                      {"peak_i", row.summary.peak_i},
                      {"t_peak", row.summary.t_peak},
                      {"final_mean_battery", row.summary.final_mean_battery}});
    }
    out << json{{"aggregates", rows}, {"outputs", paths[0].string()}}.dump() << '\n';
  } else {
    for (const auto& row : table.rows) {
      if (row.seed != -1) continue;
      std::string label;
      for (double v : row.values) label += (label.empty() ? "" : ":") + format_double(v);
      out << label << ": mean peak I = " << format_double(row.summary.peak_i)
          << ", mean final battery = " << format_double(row.summary.final_mean_battery) << '\n';
    }
    out << "wrote " << list_paths(paths) << '\n';
  }
  return kExitOk;
}

struct CompareFlags {
  std::optional<int> seeds;
  std::optional<double> dt;
};

int cmd_compare(const CommonFlags& f, const Overlay& overlay, const CompareFlags& cf, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = resolve<io::CompareConfig>(f, overlay, "compare", "compare", [&](json& j) {
    if (cf.seeds) j["seeds"] = *cf.seeds;
    if (cf.dt) j["dt"] = *cf.dt;
    if (f.seed) j["abm"]["seed"] = *f.seed;
  });
  const auto cmp = compare_mean_field(cfg.abm, cfg.seeds, cfg.dt, f.threads);

  std::ostringstream csv;
  write_csv(csv, cmp);
  const auto dir = out_dir(f, "compare");
  std::vector<fs::path> paths{io::write_text(dir, "compare.csv", csv.str())};
  io::RunManifest manifest{std::string(kVersion), "compare", io::to_json(io::RunConfig{cfg}),
                           seed_list(cfg.abm.seed, cfg.seeds), {"compare.csv"}, seconds_since(t0)};
  paths.push_back(io::write_manifest(manifest, dir));

  const json summary{{"ode_peak_i", cmp.ode_peak_i},       {"abm_peak_i", cmp.abm_peak_i},
                     {"peak_rel_dev", cmp.peak_rel_dev},   {"max_abs_dev_i", cmp.max_abs_dev_i},
                     {"max_rel_dev_i", cmp.max_rel_dev_i}, {"outputs", paths[0].string()}};
  if (f.json_output) {
    out << summary.dump() << '\n';
  } else {
    out << "ODE peak i = " << format_double(cmp.ode_peak_i) << ", ABM mean peak i = " << format_double(cmp.abm_peak_i)
        << ", peak deviation = " << format_double(100.0 * cmp.peak_rel_dev) << "%, max |delta i| = "
        << format_double(cmp.max_abs_dev_i) << "\nwrote " << list_paths(paths) << '\n';
  }
  return kExitOk;
}

int cmd_repro(const CommonFlags& f, const std::string& name, std::ostream& out) {
  PresetOptions opt;
  if (f.seed) opt.seed = *f.seed;
  const fs::path root = f.out.empty() ? fs::path("sirsurv-out") : fs::path(f.out);

  if (name == "list") {
    for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
    return kExitOk;
  }
  std::vector<std::string_view> names;
  if (name == "all") {
    for (const auto& p : presets()) names.push_back(p.name);
  } else {
    names.push_back(name);
  }
  json done = json::array();
  for (auto n : names) {
    const auto res = run_preset(n, root / std::string(n), opt);
    if (f.json_output) {
      json files = json::array();
      for (const auto& p : res.files) files.push_back(p.string());
      done.push_back({{"preset", n}, {"files", files}});
    } else {
      out << res.summary << "\n  wrote " << list_paths(res.files) << '\n';
    }
  }
  if (f.json_output) out << done.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data survivability under attack: SIR models, thresholds and network simulation", "sirsurv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonFlags common;
  Overlay ode_overlay, analyze_overlay, abm_overlay, sweep_overlay, compare_overlay;
  SweepFlags sweep_flags;
  CompareFlags compare_flags;
  std::string preset;

  auto* ode_cmd = app.add_subcommand("ode", "integrate one of the compartmental systems");
  add_common(*ode_cmd, common, false);
  ode_overlay.add(*ode_cmd, kOdeFlags);

  auto* analyze_cmd = app.add_subcommand("analyze", "reproduction numbers, peak, floor and equilibrium");
  add_common(*analyze_cmd, common, false);
  analyze_overlay.add(*analyze_cmd, kOdeFlags);

  auto* abm_cmd = app.add_subcommand("abm", "one stochastic network run");
  add_common(*abm_cmd, common, false);
  abm_overlay.add(*abm_cmd, kAbmFlags);

  auto* sweep_cmd = app.add_subcommand("sweep", "ABM parameter sweep over values x seeds");
  add_common(*sweep_cmd, common, true);
  sweep_overlay.add(*sweep_cmd, kAbmFlags, "/base");
  sweep_cmd->add_option("--axis", sweep_flags.axis, "field to sweep; join fields with ':' to move them together");
  sweep_cmd->add_option("--values", sweep_flags.values, "comma-separated values, e.g. 1,2,4 or 0.001:0.9,0.5:0.1");
  sweep_cmd->add_option("--seeds", sweep_flags.seeds, "seeds per value");

  auto* compare_cmd = app.add_subcommand("compare", "seed-averaged ABM against the matching ODE");
  add_common(*compare_cmd, common, true);
  compare_overlay.add(*compare_cmd, kAbmFlags, "/abm");
  compare_cmd->add_option("--seeds", compare_flags.seeds, "number of seeds to average");
  compare_cmd->add_option("--dt", compare_flags.dt, "ODE step");

  auto* repro_cmd = app.add_subcommand("repro", "reproduce a figure: fig2 ... fig12b, 'all' or 'list'");
  add_common(*repro_cmd, common, false);
  repro_cmd->add_option("preset", preset, "preset name")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (ode_cmd->parsed()) return cmd_ode(common, ode_overlay, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(common, analyze_overlay, out, err);
    if (abm_cmd->parsed()) return cmd_abm(common, abm_overlay, out);
    if (sweep_cmd->parsed()) return cmd_sweep(common, sweep_overlay, sweep_flags, out);
    if (compare_cmd->parsed()) return cmd_compare(common, compare_overlay, compare_flags, out);
    if (repro_cmd->parsed()) return cmd_repro(common, preset, out);
  } catch (const ValidationError& e) {
    const std::string field = e.field();
    if (field.rfind("--", 0) == 0 && std::string(e.what()).find("is required") != std::string::npos) {
      err << "error: missing required flag " << field << '\n';
    } else {
      err << "error: " << e.what() << '\n';
    }
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace sirsurv::cli
