#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slitsim/ensemble.hpp"

namespace slitsim {

struct Extremum {
  std::size_t index;   // bin index; centre of the run for flat tops
  double bin_center;
  double height;       // smoothed frequency
  double prominence;   // smallest drop to a neighbouring surviving extremum or edge
};

struct ExtremaReport {
  std::vector<Extremum> maxima;
  std::vector<Extremum> minima;
  int smoothing_window{5};
};

/// Centered moving average; windows are truncated at the array ends.
std::vector<double> moving_average(std::span<const double> values, int window);

/// Fringe extrema of a detector profile.
///
/// The profile is smoothed with a centered moving average of `window` bins,
/// then interior local extrema are simplified by repeatedly cancelling the
/// adjacent max/min pair (or edge-adjacent extremum) whose swing is smallest
/// relative to the Poisson floor k_sigma * sqrt(c) / n_detected, c being the
/// mean count of the pair, until every remaining swing clears the floor.
/// Surviving maxima and minima alternate along the axis.
ExtremaReport find_extrema(std::span<const double> freqs, const HistogramSpec& spec,
                           std::uint64_t n_detected, int window = 5, double k_sigma = 5);

/// Half the L1 distance between two frequency vectors.
double total_variation(std::span<const double> f1, std::span<const double> f2);

/// Sum of |differences| of the smoothed profile over its range. 1 for a
/// monotone profile, 0 for a flat one, larger the more the profile oscillates.
double oscillation_index(std::span<const double> freqs, int window = 5);

}  // namespace slitsim
