#include "slitsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace slitsim {

namespace {

void check_window(std::size_t size, int window) {
  if (window < 1 || window % 2 == 0) throw ConfigError("smoothing window must be odd and >= 1");
  if (size < static_cast<std::size_t>(window)) {
    throw ConfigError("profile is shorter than the smoothing window");
  }
}

enum class Kind { Edge, Max, Min };

struct Node {
  Kind kind;
  double value;
  std::size_t first;
  std::size_t last;
};

// Height difference measured "downhill" from the extremum towards its
// neighbour. Negative when the neighbour is an edge on the wrong side.
double swing(const Node& e, const Node& other) {
  return e.kind == Kind::Max ? e.value - other.value : other.value - e.value;
}

}  // namespace

std::vector<double> moving_average(std::span<const double> values, int window) {
  check_window(values.size(), window);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(values.size());
  // Summed outward from the centre in mirrored pairs, so a reversed input
  // gives a bit-for-bit reversed output.
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = values[i];
    std::ptrdiff_t used = 1;
    for (std::ptrdiff_t d = 1; d <= half; ++d) {
      const bool left = i - d >= 0;
      const bool right = i + d < n;
      if (left && right) {
        sum += values[i - d] + values[i + d];
        used += 2;
      }
    }
    for (std::ptrdiff_t d = 1; d <= half; ++d) {
      const bool left = i - d >= 0;
      const bool right = i + d < n;
      if (left != right) {
        sum += left ? values[i - d] : values[i + d];
        ++used;
      }
    }
    out[i] = sum / static_cast<double>(used);
  }
  return out;
}

ExtremaReport find_extrema(std::span<const double> freqs, const HistogramSpec& spec,
                           std::uint64_t n_detected, int window, double k_sigma) {
  check_window(freqs.size(), window);
  if (!(k_sigma > 0)) throw ConfigError("k_sigma must be positive");
  if (n_detected == 0) throw EmptyHistogramError("find_extrema: no detected particles");
  const std::vector<double> s = moving_average(freqs, window);
  const auto n_det = static_cast<double>(n_detected);

  // Collapse flat runs, then keep runs that are strict local extrema.
  std::vector<Node> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!runs.empty() && s[i] == runs.back().value) {
      runs.back().last = i;
    } else {
      runs.push_back({Kind::Edge, s[i], i, i});
    }
  }
  std::vector<Node> nodes{{Kind::Edge, s.front(), 0, 0}};
  for (std::size_t j = 1; j + 1 < runs.size(); ++j) {
    const double l = runs[j - 1].value;
    const double r = runs[j + 1].value;
    Node node = runs[j];
    if (node.value > l && node.value > r) {
      node.kind = Kind::Max;
    } else if (node.value < l && node.value < r) {
      node.kind = Kind::Min;
    } else {
      continue;
    }
    nodes.push_back(node);
  }
  nodes.push_back({Kind::Edge, s.back(), s.size() - 1, s.size() - 1});

  auto noise_floor = [&](double a, double b) {
    const double mean_count = std::max(0.0, (a + b) / 2) * n_det;
    return k_sigma * std::sqrt(mean_count) / n_det;
  };

  // Cancel the least significant pair until everything clears the floor.
  for (;;) {
    double best_ratio = 1.0;
    std::size_t best = 0;
    bool found = false;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Node& a = nodes[i];
      const Node& b = nodes[i + 1];
      if (a.kind == Kind::Edge && b.kind == Kind::Edge) continue;
      double sw;
      if (a.kind == Kind::Edge) {
        sw = swing(b, a);
      } else if (b.kind == Kind::Edge) {
        sw = swing(a, b);
      } else {
        sw = std::abs(a.value - b.value);
      }
      if (sw < 0) continue;
      const double floor = noise_floor(a.value, b.value);
      if (!(floor > 0)) continue;
      const double ratio = sw / floor;
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = i;
        found = true;
      }
    }
    if (!found) break;
    auto first = nodes.begin() + static_cast<std::ptrdiff_t>(best);
    if (first->kind == Kind::Edge) {
      nodes.erase(first + 1);
    } else if ((first + 1)->kind == Kind::Edge) {
      nodes.erase(first);
    } else {
      nodes.erase(first, first + 2);
    }
  }

  ExtremaReport report;
  report.smoothing_window = window;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const Node& e = nodes[i];
    double prominence = std::numeric_limits<double>::infinity();
    for (const Node* nb : {&nodes[i - 1], &nodes[i + 1]}) {
      const double sw = swing(e, *nb);
      if (nb->kind != Kind::Edge || sw >= 0) prominence = std::min(prominence, sw);
    }
    Extremum x;
    x.index = e.first + (e.last - e.first) / 2;
    x.bin_center = (spec.center(e.first) + spec.center(e.last)) / 2;
    x.height = e.value;
    x.prominence = prominence;
    (e.kind == Kind::Max ? report.maxima : report.minima).push_back(x);
  }
  return report;
}

double total_variation(std::span<const double> f1, std::span<const double> f2) {
  if (f1.size() != f2.size()) throw SpecMismatchError("total_variation: length mismatch");
  auto check = [](std::span<const double> f) {
    double sum = 0;
    for (double v : f) {
      if (!(v >= 0)) throw ConfigError("total_variation: frequencies must be non-negative");
      sum += v;
    }
    if (sum > 1 + 1e-9) throw ConfigError("total_variation: frequencies sum above 1");
  };
  check(f1);
  check(f2);
  double l1 = 0;
  for (std::size_t i = 0; i < f1.size(); ++i) l1 += std::abs(f1[i] - f2[i]);
  return l1 / 2;
}

double oscillation_index(std::span<const double> freqs, int window) {
  const std::vector<double> s = moving_average(freqs, window);
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double range = *hi - *lo;
  const double scale = std::max(std::abs(*hi), std::abs(*lo));
  if (!(range > 64 * std::numeric_limits<double>::epsilon() * scale)) return 0.0;
  double path = 0;
  for (std::size_t i = 1; i < s.size(); ++i) path += std::abs(s[i] - s[i - 1]);
  return path / range;
}

}  // namespace slitsim
