#include "slitsim/scattering.hpp"

#include <cmath>

namespace slitsim {

void Geometry::validate() const {
  if (!(emitter_distance > 0)) throw ConfigError("emitter_distance must be positive");
  if (!(screen_gap > 0)) throw ConfigError("screen_gap must be positive");
  if (!(slit_half_height > 0)) throw ConfigError("slit_half_height must be positive");
  if (!(particle_radius >= 0 && particle_radius < slit_half_height)) {
    throw ConfigError("particle_radius must satisfy 0 <= r < slit_half_height");
  }
  if (!(y_bound > slit_half_height)) throw ConfigError("y_bound must exceed slit_half_height");
  if (max_steps == 0) throw ConfigError("max_steps must be positive");
}

namespace {

ParticleStated interpolate(const ParticleStated& a, const ParticleStated& b, double frac) {
  ParticleStated s;
  s.pos = a.pos + frac * (b.pos - a.pos);
  s.vel = a.vel + frac * (b.vel - a.vel);
  s.t = a.t + frac * (b.t - a.t);
  return s;
}

struct Crossing {
  Outcome outcome;
  double frac;  // position along the segment, NaN when not a crossing
};

std::optional<Crossing> classify(const ParticleStated& a, const ParticleStated& b,
                                 const Geometry& g) {
  const double xa = a.pos.x();
  const double xb = b.pos.x();
  if ((xa < 0 && xb >= 0) || (xa > 0 && xb <= 0)) {
    const double frac = xa / (xa - xb);
    const double y = a.pos.y() + frac * (b.pos.y() - a.pos.y());
    if (std::abs(y) >= g.aperture()) return Crossing{Blocked{y}, frac};
  }
  const double d = g.screen_gap;
  if (xa < d && xb >= d) {
    const double frac = (d - xa) / (xb - xa);
    const double y = a.pos.y() + frac * (b.pos.y() - a.pos.y());
    const double t = a.t + frac * (b.t - a.t);
    return Crossing{Detected{y, t}, frac};
  }
  if (std::abs(b.pos.y()) > g.y_bound || xb < g.escape_x()) {
    return Crossing{Escaped{}, std::nan("")};
  }
  return std::nullopt;
}

template <typename Stepper>
TrajectoryRecord run_trajectory(const ParticleStated& start, const Geometry& g, bool record,
                                Stepper&& step) {
  TrajectoryRecord rec;
  if (record) rec.path.emplace().push_back(start);
  ParticleStated cur = start;
  for (std::size_t i = 0; i < g.max_steps; ++i) {
    const ParticleStated next = step(cur);
    rec.steps_taken = i + 1;
    if (auto hit = classify(cur, next, g)) {
      rec.outcome = hit->outcome;
      if (record) {
        rec.path->push_back(std::isnan(hit->frac) ? next : interpolate(cur, next, hit->frac));
      }
      return rec;
    }
    if (record) rec.path->push_back(next);
    cur = next;
  }
  rec.outcome = StepLimit{};
  return rec;
}

}  // namespace

void check_consistent(const Geometry& g, const FieldParams<double>& field) {
  g.validate();
  field.validate();
  if (g.slit_half_height != field.slit_half_height) {
    throw ConfigError("slit_half_height differs between geometry and field parameters");
  }
}

std::optional<Outcome> segment_outcome(const ParticleStated& a, const ParticleStated& b,
                                       const Geometry& g) {
  if (auto c = classify(a, b, g)) return c->outcome;
  return std::nullopt;
}

ParticleStated launch_state(double alpha, double v0, const Geometry& g) {
  ParticleStated s;
  s.pos = {-g.emitter_distance, 0.0};
  s.vel = {v0 * std::cos(alpha), v0 * std::sin(alpha)};
  s.t = 0;
  return s;
}

TrajectoryRecord run_discrete_trajectory(double alpha, double v0, const Geometry& g,
                                         const FieldParams<double>& field,
                                         const StepParams<double>& sp, bool record) {
  check_consistent(g, field);
  sp.validate();
  if (!(v0 > 0)) throw ConfigError("v0 must be positive");
  return run_trajectory(launch_state(alpha, v0, g), g, record,
                        [&](const ParticleStated& s) { return step_discrete(s, field, sp); });
}

TrajectoryRecord run_continuous_trajectory(double alpha, double v0, const Geometry& g,
                                           const FieldParams<double>& field, double mass,
                                           double h, bool record) {
  check_consistent(g, field);
  if (!(v0 > 0)) throw ConfigError("v0 must be positive");
  if (!(mass > 0)) throw ConfigError("mass must be positive");
  if (!(h > 0)) throw ConfigError("reference step must be positive");
  return run_trajectory(launch_state(alpha, v0, g), g, record,
                        [&](const ParticleStated& s) { return step_rk4(s, field, mass, h); });
}

const char* outcome_name(const Outcome& o) {
  struct Namer {
    const char* operator()(const Blocked&) const { return "blocked"; }
    const char* operator()(const Detected&) const { return "detected"; }
    const char* operator()(const Escaped&) const { return "escaped"; }
    const char* operator()(const StepLimit&) const { return "steplimit"; }
  };
  return std::visit(Namer{}, o);
}

}  // namespace slitsim
