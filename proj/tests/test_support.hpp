#pragma once

#include <cstdint>
#include <random>

#include "slitsim/ensemble.hpp"

namespace testing {

// D=5, d=25, R=5, r=0.2, q*sigma=-1, v0=12, tau=0.05, m=1.
inline slitsim::Geometry default_geometry() { return slitsim::Geometry{}; }
inline slitsim::FieldParams<double> default_field() { return {-1.0, 5.0}; }
inline slitsim::StepParams<double> default_step(double tau = 0.05) { return {tau, 1.0}; }
inline constexpr double kDefaultV0 = 12.0;

// At v0 = 12 nothing can climb the attractive field out to x = 25; at v0 = 16
// about half the particles reach the detector.
inline constexpr double kReachingV0 = 16.0;

inline double deg(double d) { return d * slitsim::kDegree; }

}  // namespace testing
