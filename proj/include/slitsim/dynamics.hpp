#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "slitsim/field.hpp"

namespace slitsim {

template <typename Scalar>
struct ParticleState {
  Vec2<Scalar> pos{Vec2<Scalar>::Zero()};
  Vec2<Scalar> vel{Vec2<Scalar>::Zero()};
  Scalar t{0};
};
using ParticleStated = ParticleState<double>;

template <typename Scalar>
struct StepParams {
  Scalar tau{0.05};  // time-discreteness parameter
  Scalar mass{1};

  void validate() const {
    using std::isfinite;
    if (!(tau > 0) || !isfinite(tau)) throw ConfigError("tau must be positive and finite");
    if (!(mass > 0) || !isfinite(mass)) throw ConfigError("mass must be positive and finite");
  }
};

/// One step of the discrete-time Newton law
///   m (v(t+tau) - v(t)) / tau = F(r(t)),   (r(t+tau) - r(t)) / tau = v(t+tau).
/// Velocity is updated first and the new velocity moves the particle.
template <typename Scalar>
ParticleState<Scalar> step_discrete(const ParticleState<Scalar>& s, const FieldParams<Scalar>& field,
                                    const StepParams<Scalar>& sp) {
  const Vec2<Scalar> force = force_closed_form(s.pos, field);
  ParticleState<Scalar> next;
  next.vel = s.vel + (sp.tau / sp.mass) * force;
  next.pos = s.pos + sp.tau * next.vel;
  next.t = s.t + sp.tau;
  return next;
}

/// Classical RK4 step of r'' = F(r)/m.
template <typename Scalar>
ParticleState<Scalar> step_rk4(const ParticleState<Scalar>& s, const FieldParams<Scalar>& field,
                               Scalar mass, Scalar h) {
  auto accel = [&](const Vec2<Scalar>& p) -> Vec2<Scalar> {
    return force_closed_form(p, field) / mass;
  };
  const Vec2<Scalar> k1x = s.vel;
  const Vec2<Scalar> k1v = accel(s.pos);
  const Vec2<Scalar> k2x = s.vel + (h / 2) * k1v;
  const Vec2<Scalar> k2v = accel(s.pos + (h / 2) * k1x);
  const Vec2<Scalar> k3x = s.vel + (h / 2) * k2v;
  const Vec2<Scalar> k3v = accel(s.pos + (h / 2) * k2x);
  const Vec2<Scalar> k4x = s.vel + h * k3v;
  const Vec2<Scalar> k4v = accel(s.pos + h * k3x);

  ParticleState<Scalar> next;
  next.pos = s.pos + (h / 6) * (k1x + 2 * k2x + 2 * k3x + k4x);
  next.vel = s.vel + (h / 6) * (k1v + 2 * k2v + 2 * k3v + k4v);
  next.t = s.t + h;
  return next;
}

/// Default reference step, 1e-4 of the emitter-to-screen flight time.
template <typename Scalar>
Scalar default_reference_step(Scalar emitter_distance, Scalar v0) {
  return Scalar(1e-4) * emitter_distance / v0;
}

/// Fixed-step RK4 trajectory starting at `s`, including `s` itself, ending with
/// the first state for which `stop` returns true.
template <typename Scalar>
std::vector<ParticleState<Scalar>> integrate_reference(
    const ParticleState<Scalar>& s, const FieldParams<Scalar>& field, Scalar mass,
    const std::function<bool(const ParticleState<Scalar>&)>& stop, Scalar h,
    std::size_t max_steps = 10'000'000) {
  if (!(h > 0)) throw ConfigError("reference step must be positive");
  if (!(mass > 0)) throw ConfigError("mass must be positive");
  std::vector<ParticleState<Scalar>> path{s};
  for (std::size_t i = 0; i < max_steps; ++i) {
    path.push_back(step_rk4(path.back(), field, mass, h));
    if (stop(path.back())) return path;
  }
  throw StepLimitError("integrate_reference: stop condition not reached in " +
                       std::to_string(max_steps) + " steps");
}

/// Total energy, kinetic plus electrostatic (zero at rest at the origin).
template <typename Scalar>
Scalar energy(const ParticleState<Scalar>& s, const FieldParams<Scalar>& field, Scalar mass) {
  return mass * s.vel.squaredNorm() / 2 + potential(s.pos, field);
}

}  // namespace slitsim
