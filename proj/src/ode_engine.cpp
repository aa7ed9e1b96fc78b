#include "sirsurv/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sirsurv/error.hpp"
#include "sirsurv/numfmt.hpp"

namespace sirsurv::ode {

Trajectory::Trajectory(ModelVariant variant, ModelParams params, double dt, double t_end,
                       std::vector<CompartmentState> samples, std::vector<std::string> warnings)
    : variant_(variant),
      params_(params),
      dt_(dt),
      t_end_(t_end),
      samples_(std::move(samples)),
      warnings_(std::move(warnings)) {}

namespace {

CompartmentState advance(const CompartmentState& x, const Rates& k, double h) {
  return {x.s + h * k.ds, x.i + h * k.di, x.r + h * k.dr, x.t};
}

void check_init(const CompartmentState& init) {
  const auto check = [](const char* field, double v) {
    if (!std::isfinite(v)) throw ValidationError(field, "initial value must be finite");
    if (v < 0.0) throw ValidationError(field, "initial value must be >= 0");
  };
  check("s0", init.s);
  check("i0", init.i);
  check("r_init", init.r);
}

}  // namespace

Trajectory integrate(ModelVariant variant, const ModelParams& params, const CompartmentState& init,
                     double t_end, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw ValidationError("dt", "must be > 0");
  if (!std::isfinite(t_end) || t_end < 0.0) throw ValidationError("t_end", "must be >= 0");
  auto warnings = validate(variant, params);
  check_init(init);

  // The small slack keeps t_end = k*dt from losing its last step to rounding.
  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  std::vector<CompartmentState> out;
  out.reserve(steps + 1);
  CompartmentState x{init.s, init.i, init.r, 0.0};
  out.push_back(x);

  double worst_clamp = 0.0;
  double worst_clamp_t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    Rates k1, k2, k3, k4;
    try {
      k1 = derivative(variant, params, x);
      k2 = derivative(variant, params, advance(x, k1, dt / 2));
      k3 = derivative(variant, params, advance(x, k2, dt / 2));
      k4 = derivative(variant, params, advance(x, k3, dt));
    } catch (const InvalidStateError&) {
      throw DivergedError(static_cast<double>(k) * dt, "integration diverged");
    }

    CompartmentState next{
        x.s + dt / 6 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds),
        x.i + dt / 6 * (k1.di + 2 * k2.di + 2 * k3.di + k4.di),
        x.r + dt / 6 * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr),
        static_cast<double>(k) * dt,
    };
    if (!std::isfinite(next.s) || !std::isfinite(next.i) || !std::isfinite(next.r)) {
      throw DivergedError(next.t, "integration diverged");
    }
    for (double* v : {&next.s, &next.i, &next.r}) {
      if (*v < 0.0) {
        if (-*v > worst_clamp) {
          worst_clamp = -*v;
          worst_clamp_t = next.t;
        }
        *v = 0.0;
      }
    }
    out.push_back(next);
    x = next;
  }

  if (worst_clamp > kClampWarnThreshold) {
    warnings.push_back("clamped a negative excursion of " + format_double(worst_clamp) +
                       " at t = " + format_double(worst_clamp_t));
  }
  return Trajectory(variant, params, dt, t_end, std::move(out), std::move(warnings));
}

Peak peak_informed(const Trajectory& traj) {
  const auto samples = traj.samples();
  if (samples.empty()) throw InvalidStateError("peak of an empty trajectory");
  // max_element keeps the first of equal maxima.
  const auto it = std::max_element(samples.begin(), samples.end(),
                                   [](const auto& a, const auto& b) { return a.i < b.i; });
  return {it->t, it->i};
}

CompartmentState final_state(const Trajectory& traj) {
  if (traj.empty()) throw InvalidStateError("final state of an empty trajectory");
  return traj.samples().back();
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,s,i,r\n";
  for (const auto& x : traj.samples()) {
    out << format_double(x.t) << ',' << format_double(x.s) << ',' << format_double(x.i) << ','
        << format_double(x.r) << '\n';
  }
}

}  // namespace sirsurv::ode
