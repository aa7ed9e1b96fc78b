#pragma once

#include <iosfwd>
#include <vector>

#include "sirsurv/abm.hpp"
#include "sirsurv/sir_core.hpp"

namespace sirsurv {

/// ODE system whose rates match an ABM death wiring.
ModelVariant matching_variant(abm::DeathWiring wiring);

struct ComparisonRow {
  int t = 0;
  double ode_s = 0.0;
  double ode_i = 0.0;
  double ode_r = 0.0;
  double abm_s = 0.0;
  double abm_i = 0.0;
  double abm_r = 0.0;
  double abm_dead = 0.0;
};

/// Seed-averaged ABM against the deterministic system on the integer time
/// grid, everything as fractions of n.
struct Comparison {
  std::vector<ComparisonRow> rows;
  double ode_peak_i = 0.0;
  double abm_peak_i = 0.0;
  double peak_rel_dev = 0.0;  // |abm_peak - ode_peak| / ode_peak
  double max_abs_dev_i = 0.0;
  double max_rel_dev_i = 0.0;  // max_t |abm_i - ode_i| / ode_peak
};

/// The ODE uses the ABM's b, c, m, m' in the fraction convention and starts
/// from the ABM's exact initial split.
Comparison compare_mean_field(const abm::AbmConfig& config, int seeds, double dt, unsigned threads = 0);

/// `t,ode_s,ode_i,ode_r,abm_s,abm_i,abm_r,abm_dead`.
void write_csv(std::ostream& out, const Comparison& cmp);

}  // namespace sirsurv
