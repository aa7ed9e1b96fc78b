#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sirsurv/sir_core.hpp"

namespace sirsurv::ode {

inline constexpr double kDefaultDt = 0.01;
/// Clamps larger than this are reported through Trajectory::warnings().
inline constexpr double kClampWarnThreshold = 1e-6;

/// Uniformly sampled solution of one of the compartmental systems.
/// Immutable once built.
class Trajectory {
public:
  Trajectory(ModelVariant variant, ModelParams params, double dt, double t_end,
             std::vector<CompartmentState> samples, std::vector<std::string> warnings = {});

  ModelVariant variant() const noexcept { return variant_; }
  const ModelParams& params() const noexcept { return params_; }
  double dt() const noexcept { return dt_; }
  double t_end() const noexcept { return t_end_; }

  std::span<const CompartmentState> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const CompartmentState& operator[](std::size_t k) const { return samples_[k]; }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
  ModelVariant variant_;
  ModelParams params_;
  double dt_;
  double t_end_;
  std::vector<CompartmentState> samples_;
  std::vector<std::string> warnings_;
};

/// Fixed-step classic RK4 from `init` (its t is ignored; the run starts at 0).
/// Produces floor(t_end/dt) + 1 samples at t = k*dt, each component clamped
/// to >= 0 after every step.
///
/// Throws ValidationError on bad dt/t_end/params/init and DivergedError if the
/// state becomes non-finite.
Trajectory integrate(ModelVariant variant, const ModelParams& params, const CompartmentState& init,
                     double t_end, double dt = kDefaultDt);

struct Peak {
  double t = 0.0;
  double i = 0.0;
};

/// Argmax of i over the samples; ties go to the earliest sample.
Peak peak_informed(const Trajectory& traj);

/// Last sample. Throws InvalidStateError on an empty trajectory.
CompartmentState final_state(const Trajectory& traj);

/// `t,s,i,r` with shortest round-trip decimals.
void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace sirsurv::ode
