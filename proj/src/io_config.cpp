#include "sirsurv/io_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include "sirsurv/error.hpp"
#include "sirsurv/version.hpp"

namespace sirsurv::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads typed fields out of one JSON object and rejects any key nobody asked for.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw ValidationError(scope_.empty() ? "config" : scope_, "expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ValidationError(name(key), "expected a number");
    return v.get<double>();
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ValidationError(name(key), "is required");
    return number(key, 0.0);
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ValidationError(name(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ValidationError(name(key), "out of range");
    }
    return static_cast<int>(x);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ValidationError(name(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ValidationError(name(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ValidationError(name(key), "expected a string");
    return v.get<std::string>();
  }

  const json& object(const std::string& key) {
    static const json empty = json::object();
    return has(key) ? j_.at(key) : empty;
  }

  const json* raw(const std::string& key) { return has(key) ? &j_.at(key) : nullptr; }

  std::string name(const std::string& key) const { return scope_.empty() ? key : scope_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ValidationError(name(key), "unknown key");
    }
  }

private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

OdeRunConfig ode_from_json(const json& j) {
  ObjectReader in(j, "");
  in.string("type", "ode");
  OdeRunConfig c;
  c.variant = parse_variant(in.string("variant", "classic"));
  c.b = in.required_number("b");
  c.c = in.required_number("c");
  c.m = in.number("m", 0.0);
  c.m_prime = in.number("m_prime", 0.0);
  c.l = in.number("l", 0.0);
  c.fractions = in.boolean("fractions", false);
  c.n = in.number("n", c.fractions ? 1.0 : 10000.0);
  const double pop = c.fractions ? 1.0 : c.n;
  c.s0 = in.number("s0", 0.9 * pop);
  c.i0 = in.number("i0", 0.1 * pop);
  c.r_init = in.number("r_init", 0.0);
  c.t_end = in.number("t_end", 200.0);
  c.dt = in.number("dt", ode::kDefaultDt);
  in.finish();
  validate(c);
  return c;
}

abm::AbmConfig abm_from_json(const json& j, const std::string& scope, bool allow_type) {
  ObjectReader in(j, scope);
  if (allow_type) in.string("type", "abm");
  abm::AbmConfig c;
  c.n = in.integer("n", c.n);
  c.init_i_fraction = in.number("init_i_fraction", c.init_i_fraction);
  c.b = in.number("b", c.b);
  c.c = in.number("c", c.c);
  c.m = in.number("m", c.m);
  c.m_prime = in.number("m_prime", c.m_prime);
  c.t_steps = in.integer("t_steps", c.t_steps);
  c.seed = in.unsigned_integer("seed", c.seed);
  c.deaths = abm::parse_death_wiring(in.string("deaths", std::string(abm::to_string(c.deaths))));
  c.k_topology = in.integer("k_topology", c.k_topology);
  c.initial_battery = in.number("initial_battery", c.initial_battery);

  ObjectReader st(in.object("strategy"), in.name("strategy"));
  auto& s = c.strategy;
  s.kind = abm::parse_strategy(st.string("kind", std::string(abm::to_string(s.kind))));
  s.k = st.integer("k", s.k);
  s.k_max = st.integer("k_max", s.k_max);
  s.iter_max = st.integer("iter_max", s.iter_max);
  s.tx_cost = st.number("tx_cost", s.tx_cost);
  s.idle_cost = st.number("idle_cost", s.idle_cost);
  s.tau = st.number("tau", s.tau);
  st.finish();
  in.finish();
  abm::validate(c);
  return c;
}

SweepConfig sweep_from_json(const json& j) {
  ObjectReader in(j, "");
  in.string("type", "sweep");
  SweepConfig c;
  c.base = abm_from_json(in.object("base"), "base", false);
  c.seeds = in.integer("seeds", 1);

  const json* axis = in.raw("axis");
  if (!axis) throw ValidationError("axis", "is required");
  if (axis->is_string()) {
    c.axis.fields = {axis->get<std::string>()};
  } else if (axis->is_array() && !axis->empty() && std::all_of(axis->begin(), axis->end(), [](const json& v) { return v.is_string(); })) {
    c.axis.fields = axis->get<std::vector<std::string>>();
  } else {
    throw ValidationError("axis", "expected a field name or a list of names");
  }

  const json* values = in.raw("values");
  if (!values || !values->is_array()) throw ValidationError("values", "expected an array");
  for (const auto& v : *values) {
    if (v.is_number()) {
      c.axis.points.push_back({v.get<double>()});
    } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      c.axis.points.push_back(v.get<std::vector<double>>());
    } else {
      throw ValidationError("values", "expected numbers or arrays of numbers");
    }
  }
  in.finish();
  validate(c);
  return c;
}

CompareConfig compare_from_json(const json& j) {
  ObjectReader in(j, "");
  in.string("type", "compare");
  CompareConfig c;
  c.abm = abm_from_json(in.object("abm"), "abm", false);
  c.seeds = in.integer("seeds", c.seeds);
  c.dt = in.number("dt", c.dt);
  in.finish();
  validate(c);
  return c;
}

json abm_to_json(const abm::AbmConfig& c) {
  const auto& s = c.strategy;
  return json{
      {"n", c.n},
      {"init_i_fraction", c.init_i_fraction},
      {"b", c.b},
      {"c", c.c},
      {"m", c.m},
      {"m_prime", c.m_prime},
      {"t_steps", c.t_steps},
      {"seed", c.seed},
      {"deaths", abm::to_string(c.deaths)},
      {"k_topology", c.k_topology},
      {"initial_battery", c.initial_battery},
      {"strategy",
       {{"kind", abm::to_string(s.kind)},
        {"k", s.k},
        {"k_max", s.k_max},
        {"iter_max", s.iter_max},
        {"tx_cost", s.tx_cost},
        {"idle_cost", s.idle_cost},
        {"tau", s.tau}}},
  };
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

fs::path write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

template <class Result>
std::vector<fs::path> write_with_manifest(const Result& result, RunManifest manifest, const fs::path& out_dir,
                                          const std::string& name) {
  std::ostringstream csv;
  if constexpr (std::is_same_v<Result, ode::Trajectory>) {
    ode::write_csv(csv, result);
  } else {
    abm::write_csv(csv, result);
  }
  const auto data = write_text(out_dir, name, csv.str());
  manifest.outputs.push_back(name);
  return {data, write_manifest(manifest, out_dir)};
}

}  // namespace

ModelParams model_params(const OdeRunConfig& c) {
  ModelParams p;
  p.b = c.fractions ? c.b : c.b / c.n;
  p.c = c.c;
  p.m = c.m;
  p.m_prime = c.m_prime;
  p.l = c.l;
  p.n_total = c.fractions ? 1.0 : c.n;
  return p;
}

CompartmentState initial_state(const OdeRunConfig& c) { return {c.s0, c.i0, c.r_init, 0.0}; }

double population(const OdeRunConfig& c) { return c.fractions ? 1.0 : c.n; }

void validate(const OdeRunConfig& c) {
  if (!std::isfinite(c.n) || c.n <= 0.0) throw ValidationError("n", "must be > 0");
  if (!std::isfinite(c.b) || c.b < 0.0) throw ValidationError("b", "must be >= 0");
  sirsurv::validate(c.variant, model_params(c));
  for (const auto& [field, v] : {std::pair{"s0", c.s0}, {"i0", c.i0}, {"r_init", c.r_init}}) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(field, "must be finite and >= 0");
  }
  if (!std::isfinite(c.dt) || c.dt <= 0.0) throw ValidationError("dt", "must be > 0");
  if (!std::isfinite(c.t_end) || c.t_end < 0.0) throw ValidationError("t_end", "must be >= 0");
}

void validate(const SweepConfig& c) {
  abm::validate(c.base);
  if (c.seeds < 1) throw ValidationError("seeds", "must be >= 1");
  if (c.axis.fields.empty()) throw ValidationError("axis", "names no field");
  if (c.axis.points.empty()) throw ValidationError("values", "must not be empty");
  for (const auto& point : c.axis.points) {
    if (point.size() != c.axis.fields.size()) throw ValidationError("values", "each point needs one value per axis field");
    abm::AbmConfig probe = c.base;
    for (std::size_t f = 0; f < point.size(); ++f) abm::set_field(probe, c.axis.fields[f], point[f]);
    abm::validate(probe);
  }
}

void validate(const CompareConfig& c) {
  abm::validate(c.abm);
  if (c.seeds < 1) throw ValidationError("seeds", "must be >= 1");
  if (!std::isfinite(c.dt) || c.dt <= 0.0 || c.dt > 1.0) throw ValidationError("dt", "must lie in (0, 1]");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config", "expected a JSON object");
  const std::string type = j.contains("type") && j.at("type").is_string() ? j.at("type").get<std::string>() : "ode";
  if (type == "ode") return ode_from_json(j);
  if (type == "abm") return abm_from_json(j, "", true);
  if (type == "sweep") return sweep_from_json(j);
  if (type == "compare") return compare_from_json(j);
  throw ValidationError("type", "unknown config type '" + type + "'");
}

json to_json(const RunConfig& config) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, OdeRunConfig>) {
          return json{{"type", "ode"},   {"variant", to_string(c.variant)},
                      {"b", c.b},        {"c", c.c},
                      {"m", c.m},        {"m_prime", c.m_prime},
                      {"l", c.l},        {"n", c.n},
                      {"s0", c.s0},      {"i0", c.i0},
                      {"r_init", c.r_init}, {"t_end", c.t_end},
                      {"dt", c.dt},      {"fractions", c.fractions}};
        } else if constexpr (std::is_same_v<T, abm::AbmConfig>) {
          auto j = abm_to_json(c);
          j["type"] = "abm";
          return j;
        } else if constexpr (std::is_same_v<T, SweepConfig>) {
          json axis = c.axis.fields.size() == 1 ? json(c.axis.fields.front()) : json(c.axis.fields);
          json values = json::array();
          for (const auto& p : c.axis.points) values.push_back(p.size() == 1 ? json(p.front()) : json(p));
          return json{{"type", "sweep"}, {"base", abm_to_json(c.base)}, {"axis", axis}, {"values", values}, {"seeds", c.seeds}};
        } else {
          return json{{"type", "compare"}, {"abm", abm_to_json(c.abm)}, {"seeds", c.seeds}, {"dt", c.dt}};
        }
      },
      config);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw ParseError(line, col, e.what());
  }
  // A manifest carries the resolved config of the run it describes.
  if (j.is_object() && j.contains("tool_version") && j.contains("config")) return config_from_json(j.at("config"));
  return config_from_json(j);
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void save_config(const RunConfig& config, const fs::path& path) {
  write_file(path, to_json(config).dump(2) + "\n");
}

json to_json(const RunManifest& m) {
  return json{{"tool", "sirsurv"},       {"tool_version", m.tool_version}, {"command", m.command},
              {"config", m.config},      {"seeds", m.seeds},               {"outputs", m.outputs},
              {"wall_seconds", m.wall_seconds}};
}

fs::path write_text(const fs::path& out_dir, const std::string& name, const std::string& contents) {
  ensure_dir(out_dir);
  return write_file(out_dir / name, contents);
}

fs::path write_manifest(const RunManifest& manifest, const fs::path& out_dir) {
  RunManifest m = manifest;
  if (m.tool_version.empty()) m.tool_version = std::string(kVersion);
  return write_text(out_dir, "manifest.json", to_json(m).dump(2) + "\n");
}

std::vector<fs::path> write_results(const ode::Trajectory& traj, RunManifest manifest, const fs::path& out_dir) {
  return write_with_manifest(traj, std::move(manifest), out_dir, "trajectory.csv");
}

std::vector<fs::path> write_results(const abm::AbmResult& result, RunManifest manifest, const fs::path& out_dir) {
  return write_with_manifest(result, std::move(manifest), out_dir, "abm.csv");
}

std::vector<fs::path> write_results(const abm::SweepTable& table, RunManifest manifest, const fs::path& out_dir) {
  return write_with_manifest(table, std::move(manifest), out_dir, "sweep.csv");
}

}  // namespace sirsurv::io
