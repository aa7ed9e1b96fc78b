#include "sirsurv/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "sirsurv/error.hpp"

namespace sirsurv::analytics {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Decay: return "Decay";
    case Outcome::Epidemic: return "Epidemic";
    case Outcome::Endemic: return "Endemic";
  }
  return "unknown";
}

namespace {

double unscaled_contact_rate(const ModelParams& p) { return p.b * p.n_total; }

// Rate at which an informed node leaves I in the closed systems.
double informed_exit_rate(ModelVariant variant, const ModelParams& p) {
  return variant == ModelVariant::DeathSituations13 ? p.c + p.m_prime : p.c;
}

}  // namespace

double basic_reproduction_number(ModelVariant variant, const ModelParams& p) {
  if (variant == ModelVariant::BirthDeath) {
    if (p.m <= 0.0) throw UndefinedThresholdError("R0 undefined for the birth-death model with m = 0");
    if (p.c + p.m <= 0.0) throw UndefinedThresholdError("R0 undefined with c + m = 0");
    return p.b * p.l / (p.m * (p.c + p.m));
  }
  const double exit = informed_exit_rate(variant, p);
  if (exit <= 0.0) throw UndefinedThresholdError("R0 undefined with c = 0");
  return unscaled_contact_rate(p) / exit;
}

double effective_reproduction_number(const ModelParams& p, double s0, double n) {
  return effective_reproduction_number(ModelVariant::Classic, p, s0, n);
}

double effective_reproduction_number(ModelVariant variant, const ModelParams& p, double s0, double n) {
  if (n <= 0.0) throw UndefinedThresholdError("Re undefined for n <= 0");
  if (variant == ModelVariant::BirthDeath) {
    // I grows initially iff b*s0 > c + m.
    if (p.c + p.m <= 0.0) throw UndefinedThresholdError("Re undefined with c + m = 0");
    return p.b * s0 / (p.c + p.m);
  }
  const double exit = informed_exit_rate(variant, p);
  if (exit <= 0.0) throw UndefinedThresholdError("Re undefined with c = 0");
  return s0 * unscaled_contact_rate(p) / (n * exit);
}

double max_informed(const ModelParams& p, double s0, double i0) {
  if (p.b <= 0.0) throw DomainError("I_max undefined without transmission (b = 0)");
  if (p.c == 0.0) return i0 + s0;  // q ln q -> 0
  const double q = p.c / p.b;
  if (s0 <= q) return i0;
  return i0 + s0 - q * std::log(s0) - q * (1.0 - std::log(q));
}

double susceptible_floor(const ModelParams& p, double s0) {
  return susceptible_floor(s0, basic_reproduction_number(ModelVariant::Classic, p));
}

double susceptible_floor(double s0, double r0) { return s0 * std::exp(-r0); }

double conserved_quantity(const ModelParams& p, double s, double i) {
  if (s <= 0.0) throw DomainError("F(s, i) needs s > 0");
  if (p.b <= 0.0) throw DomainError("F(s, i) needs b > 0");
  return s + i - (p.c / p.b) * std::log(s);
}

Equilibrium endemic_equilibrium(const ModelParams& p) {
  if (p.m <= 0.0) throw DomainError("no finite equilibrium with m = 0");
  if (p.b <= 0.0) return {p.l / p.m, 0.0, 0.0};

  const double inflow = p.b * p.l;
  const double outflow = p.m * (p.c + p.m);
  // R0 == 1 up to rounding is the information-free point.
  if (inflow - outflow <= 1e-12 * std::max(inflow, outflow)) return {p.l / p.m, 0.0, 0.0};

  const double s = (p.c + p.m) / p.b;
  const double i = (inflow - outflow) / (p.b * (p.c + p.m));
  return {s, i, p.c * i / p.m};
}

OutcomeReport classify_outcome(ModelVariant variant, const ModelParams& p, double s0, double i0,
                               double n) {
  validate(variant, p);
  OutcomeReport rep;
  rep.r0 = basic_reproduction_number(variant, p);
  rep.re = effective_reproduction_number(variant, p, s0, n);

  if (variant == ModelVariant::BirthDeath) {
    rep.outcome = rep.r0 > 1.0 ? Outcome::Endemic : Outcome::Decay;
    rep.equilibrium = endemic_equilibrium(p);
    return rep;
  }

  rep.outcome = rep.re > 1.0 ? Outcome::Epidemic : Outcome::Decay;
  if (variant == ModelVariant::Classic) {
    if (p.b > 0.0) rep.i_max = max_informed(p, s0, i0);
    rep.s_floor = susceptible_floor(s0, rep.r0);
  }
  return rep;
}

void to_json(nlohmann::json& j, const OutcomeReport& rep) {
  j = nlohmann::json{{"r0", rep.r0}, {"re", rep.re}, {"outcome", to_string(rep.outcome)}};
  if (rep.i_max) j["i_max"] = *rep.i_max;
  if (rep.s_floor) j["s_floor"] = *rep.s_floor;
  if (rep.equilibrium) {
    j["equilibrium"] = {rep.equilibrium->s, rep.equilibrium->i, rep.equilibrium->r};
  }
}

}  // namespace sirsurv::analytics
