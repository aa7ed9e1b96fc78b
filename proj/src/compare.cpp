#include "sirsurv/compare.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sirsurv/error.hpp"
#include "sirsurv/numfmt.hpp"
#include "sirsurv/ode_engine.hpp"

namespace sirsurv {

ModelVariant matching_variant(abm::DeathWiring wiring) {
  switch (wiring) {
    case abm::DeathWiring::None: return ModelVariant::Classic;
    case abm::DeathWiring::Situation2: return ModelVariant::DeathSituation2;
    case abm::DeathWiring::Situations13: return ModelVariant::DeathSituations13;
  }
  return ModelVariant::Classic;
}

Comparison compare_mean_field(const abm::AbmConfig& config, int seeds, double dt, unsigned threads) {
  abm::validate(config);
  const double steps_per_unit = 1.0 / dt;
  if (std::abs(steps_per_unit - std::round(steps_per_unit)) > 1e-9) {
    throw ValidationError("dt", "must divide one time unit evenly");
  }

  const auto mean = abm::ensemble_mean(config, seeds, threads);
  const double n = config.n;
  const double informed = static_cast<double>(std::llround(config.init_i_fraction * n));

  ModelParams p;
  p.b = config.b;
  p.c = config.c;
  p.m = config.m;
  p.m_prime = config.m_prime;
  const auto traj = ode::integrate(matching_variant(config.deaths), p,
                                   {(n - informed) / n, informed / n, 0.0, 0.0}, config.t_steps, dt);

  Comparison cmp;
  const auto stride = static_cast<std::size_t>(std::llround(steps_per_unit));
  for (const auto& row : mean) {
    const auto& x = traj[static_cast<std::size_t>(row.t) * stride];
    cmp.rows.push_back({row.t, x.s, x.i, x.r, row.s / n, row.i / n, row.r / n, row.dead / n});
  }
  cmp.ode_peak_i = ode::peak_informed(traj).i;
  for (const auto& row : cmp.rows) {
    cmp.abm_peak_i = std::max(cmp.abm_peak_i, row.abm_i);
    cmp.max_abs_dev_i = std::max(cmp.max_abs_dev_i, std::abs(row.abm_i - row.ode_i));
  }
  if (cmp.ode_peak_i > 0.0) {
    cmp.peak_rel_dev = std::abs(cmp.abm_peak_i - cmp.ode_peak_i) / cmp.ode_peak_i;
    cmp.max_rel_dev_i = cmp.max_abs_dev_i / cmp.ode_peak_i;
  }
  return cmp;
}

void write_csv(std::ostream& out, const Comparison& cmp) {
  out << "t,ode_s,ode_i,ode_r,abm_s,abm_i,abm_r,abm_dead\n";
  for (const auto& r : cmp.rows) {
    out << r.t;
    for (double v : {r.ode_s, r.ode_i, r.ode_r, r.abm_s, r.abm_i, r.abm_r, r.abm_dead}) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace sirsurv
