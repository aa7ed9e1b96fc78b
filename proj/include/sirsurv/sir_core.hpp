#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sirsurv {

/// Which compartmental system drives the dynamics.
///
/// The R compartment may be read as attacker-compromised nodes, battery-dead
/// nodes, or live nodes that stopped forwarding. All three readings share the
/// Classic dynamics; the death-rate variants differ in where deaths flow.
enum class ModelVariant {
  Classic,            ///< S' = -bIS, I' = bIS - cI, R' = cI
  DeathSituation2,    ///< R holds dead nodes: S' = -bIS - mS, R' = cI + mS
  DeathSituations13,  ///< living R: I' = bIS - cI - m'I, R' = cI - mR
  BirthDeath,         ///< S' = l - bIS - mS, every compartment dies at m
};

std::string_view to_string(ModelVariant v);
/// Accepts the canonical names plus short aliases (classic, situation2, situations13, birth-death).
ModelVariant parse_variant(std::string_view name);

/// Rate constants. `b` acts on the stored magnitudes directly, so callers
/// working in counts pass the already N-scaled contact rate.
struct ModelParams {
  double b = 0.0;
  double c = 0.0;
  double m = 0.0;
  double m_prime = 0.0;
  double l = 0.0;
  double n_total = 1.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws ValidationError naming the first offending field. Returns
/// non-fatal warnings (e.g. m' < m for DeathSituations13).
std::vector<std::string> validate(ModelVariant variant, const ModelParams& params);

struct CompartmentState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double t = 0.0;

  double total() const noexcept { return s + i + r; }

  friend bool operator==(const CompartmentState&, const CompartmentState&) = default;
};

struct Rates {
  double ds = 0.0;
  double di = 0.0;
  double dr = 0.0;

  friend bool operator==(const Rates&, const Rates&) = default;
};

/// Right-hand side of the selected system. No clamping is applied; negative
/// inputs are evaluated as given. Throws InvalidStateError on non-finite input.
Rates derivative(ModelVariant variant, const ModelParams& params, const CompartmentState& state);

}  // namespace sirsurv
