#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "slitsim/scattering.hpp"

namespace slitsim {

inline constexpr double kDegree = std::numbers::pi / 180.0;

struct EmissionSpec {
  enum class Mode { Random, Sweep };

  double v0{12};
  double alpha_min{-45.5 * kDegree};  // radians
  double alpha_max{45.5 * kDegree};
  Mode mode{Mode::Random};
  std::uint64_t seed{0};  // Random mode only
  std::size_t n{1000};

  void validate() const;
  /// Launch angle of trajectory `i`. Random mode draws from the substream keyed
  /// by (seed, i); Sweep mode spaces n angles evenly with both ends included.
  double alpha(std::size_t i) const;
};

/// Uniform double in [0, 1) that depends only on (seed, index).
double counter_uniform(std::uint64_t seed, std::uint64_t index);

struct HistogramSpec {
  double bin_width{0.4};
  double y_min{-25};
  double y_max{25};

  void validate() const;
  std::size_t bins() const;
  double center(std::size_t k) const { return y_min + (static_cast<double>(k) + 0.5) * bin_width; }

  bool operator==(const HistogramSpec&) const = default;
};

struct Histogram {
  HistogramSpec spec;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_emitted{0};
  std::uint64_t n_detected{0};
  std::uint64_t n_blocked{0};
  std::uint64_t n_escaped{0};
  std::uint64_t n_steplimit{0};
  // Detected hits below y_min / above y_max; included in n_detected.
  std::uint64_t n_underflow{0};
  std::uint64_t n_overflow{0};

  Histogram() = default;
  explicit Histogram(const HistogramSpec& s);

  void record(const Outcome& o);
  /// Throws Error if the tallies are inconsistent.
  void check_conservation() const;

  bool operator==(const Histogram&) const = default;
};

Histogram run_ensemble(const EmissionSpec& e, const Geometry& g, const FieldParams<double>& f,
                       const StepParams<double>& sp, const HistogramSpec& h, unsigned workers = 1);

Histogram merge(const Histogram& a, const Histogram& b);

/// counts / n_detected. Sums to 1 minus the under/overflow fraction.
std::vector<double> normalize(const Histogram& h);

}  // namespace slitsim
