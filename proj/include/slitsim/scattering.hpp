#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "slitsim/dynamics.hpp"

namespace slitsim {

/// Emitter at x = -D, slit screen at x = 0, detector plane at x = +d.
struct Geometry {
  double emitter_distance{5};  // D
  double screen_gap{25};       // d
  double slit_half_height{5};  // R, must match FieldParams
  double particle_radius{0.2};
  double y_bound{50};
  std::size_t max_steps{1'000'000};

  void validate() const;
  /// A particle passes x = 0 only if |y| < R - r there.
  double aperture() const { return slit_half_height - particle_radius; }
  double escape_x() const { return -2 * emitter_distance; }
};

/// Validates both and requires the same slit half-height.
void check_consistent(const Geometry& g, const FieldParams<double>& field);

struct Blocked {
  double y_impact;
};
struct Detected {
  double y_hit;
  double t_hit;
};
struct Escaped {};
struct StepLimit {};

using Outcome = std::variant<Blocked, Detected, Escaped, StepLimit>;

struct TrajectoryRecord {
  Outcome outcome{StepLimit{}};
  /// Stepped states from launch; when the run ends on a plane crossing the last
  /// entry is the interpolated crossing point.
  std::optional<std::vector<ParticleStated>> path;
  std::size_t steps_taken{0};
};

/// Classify the straight segment a -> b. Checked in order: screen crossing
/// outside the aperture, detector crossing, escape bounds.
std::optional<Outcome> segment_outcome(const ParticleStated& a, const ParticleStated& b,
                                       const Geometry& g);

/// State at x = -D, y = 0 moving with speed v0 at angle alpha (radians) to +x.
ParticleStated launch_state(double alpha, double v0, const Geometry& g);

TrajectoryRecord run_discrete_trajectory(double alpha, double v0, const Geometry& g,
                                         const FieldParams<double>& field,
                                         const StepParams<double>& sp, bool record = false);

TrajectoryRecord run_continuous_trajectory(double alpha, double v0, const Geometry& g,
                                           const FieldParams<double>& field, double mass,
                                           double h, bool record = false);

inline bool is_detected(const Outcome& o) { return std::holds_alternative<Detected>(o); }

const char* outcome_name(const Outcome& o);

}  // namespace slitsim
