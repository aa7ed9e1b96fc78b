#pragma once

#include <optional>
#include <string_view>

#include "json.hpp"

#include "sirsurv/sir_core.hpp"

namespace sirsurv::analytics {

enum class Outcome { Decay, Epidemic, Endemic };

std::string_view to_string(Outcome o);

struct Equilibrium {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
};

struct OutcomeReport {
  double r0 = 0.0;
  double re = 0.0;
  Outcome outcome = Outcome::Decay;
  std::optional<double> i_max;
  std::optional<double> s_floor;
  std::optional<Equilibrium> equilibrium;
};

/// beta/c for the closed systems, with beta = b * n_total (b itself when
/// working in fractions). DeathSituations13 uses c + m' since informed nodes
/// also leave I by dying. BirthDeath: b*l / (m*(c+m)).
/// Throws UndefinedThresholdError when the denominator vanishes.
double basic_reproduction_number(ModelVariant variant, const ModelParams& params);

/// s0 * beta / (n * c): R0 scaled by the initial susceptible share.
double effective_reproduction_number(const ModelParams& params, double s0, double n);
double effective_reproduction_number(ModelVariant variant, const ModelParams& params, double s0,
                                     double n);

/// Closed-form peak of I for the Classic system. When s0 <= c/b the peak
/// sits at t = 0 and i0 is returned. Throws DomainError for b = 0.
double max_informed(const ModelParams& params, double s0, double i0);

/// Lower bound on S(infinity): s0 * exp(-R0), R0 from the Classic system.
double susceptible_floor(const ModelParams& params, double s0);
double susceptible_floor(double s0, double r0);

/// F(s, i) = s + i - (c/b) ln s, constant along Classic trajectories.
double conserved_quantity(const ModelParams& params, double s, double i);

/// Fixed point of the BirthDeath system: the endemic one when it has i* > 0,
/// otherwise the information-free point (l/m, 0, 0).
Equilibrium endemic_equilibrium(const ModelParams& params);

/// Decay / Epidemic / Endemic with the supporting quantities. `n` is the
/// population the initial conditions are measured against (1 for fractions).
OutcomeReport classify_outcome(ModelVariant variant, const ModelParams& params, double s0, double i0,
                               double n);

void to_json(nlohmann::json& j, const OutcomeReport& report);

}  // namespace sirsurv::analytics
