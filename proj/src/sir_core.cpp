#include "sirsurv/sir_core.hpp"

#include <cmath>

#include "sirsurv/error.hpp"

namespace sirsurv {

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Classic: return "classic";
    case ModelVariant::DeathSituation2: return "death-situation2";
    case ModelVariant::DeathSituations13: return "death-situations13";
    case ModelVariant::BirthDeath: return "birth-death";
  }
  return "unknown";
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "classic") return ModelVariant::Classic;
  if (name == "death-situation2" || name == "situation2") return ModelVariant::DeathSituation2;
  if (name == "death-situations13" || name == "situations13") return ModelVariant::DeathSituations13;
  if (name == "birth-death" || name == "birthdeath") return ModelVariant::BirthDeath;
  throw ValidationError("variant", "unknown model variant '" + std::string(name) + "'");
}

namespace {

void require_rate(const char* field, double value) {
  if (!std::isfinite(value)) throw ValidationError(field, "must be finite");
  if (value < 0.0) throw ValidationError(field, "must be >= 0");
}

}  // namespace

std::vector<std::string> validate(ModelVariant variant, const ModelParams& p) {
  require_rate("b", p.b);
  require_rate("c", p.c);
  require_rate("m", p.m);
  require_rate("m_prime", p.m_prime);
  require_rate("l", p.l);
  if (!std::isfinite(p.n_total) || p.n_total <= 0.0) throw ValidationError("n_total", "must be > 0");

  std::vector<std::string> warnings;
  if (variant == ModelVariant::DeathSituations13 && p.m_prime < p.m) {
    warnings.emplace_back("m_prime < m: informed nodes are expected to die at least as fast as idle ones");
  }
  return warnings;
}

Rates derivative(ModelVariant variant, const ModelParams& p, const CompartmentState& x) {
  if (!std::isfinite(x.s) || !std::isfinite(x.i) || !std::isfinite(x.r)) {
    throw InvalidStateError("non-finite compartment state");
  }
  const double infection = p.b * x.i * x.s;
  const double recovery = p.c * x.i;

  switch (variant) {
    case ModelVariant::Classic:
      return {-infection, infection - recovery, recovery};
    case ModelVariant::DeathSituation2: {
      const double deaths = p.m * x.s;
      return {-infection - deaths, infection - recovery, recovery + deaths};
    }
    case ModelVariant::DeathSituations13:
      // R decays at m, not m_prime.
      return {-infection - p.m * x.s, infection - recovery - p.m_prime * x.i, recovery - p.m * x.r};
    case ModelVariant::BirthDeath:
      return {p.l - infection - p.m * x.s, infection - recovery - p.m * x.i, recovery - p.m * x.r};
  }
  throw InvalidStateError("unknown model variant");
}

}  // namespace sirsurv
