#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "slitsim/error.hpp"

namespace slitsim {

template <typename Scalar>
struct QuadratureResult {
  Scalar value{0};
  Scalar error{0};
  int subdivisions{0};
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
// Nodes are listed from the outside in; index 7 is the centre.
inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};

inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};

// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <typename Scalar>
struct Panel {
  Scalar a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b) {
  const Scalar centre = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(centre);
  Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
  Scalar gauss = fc * Scalar(kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodNodes[j]);
    const Scalar pair = f(centre - dx) + f(centre + dx);
    kronrod += Scalar(kKronrodWeights[j]) * pair;
    if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * pair;
  }
  using std::abs;
  return {a, b, kronrod * half, abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration over the partition given by
/// `breakpoints` (sorted ascending, at least two entries). The panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// `abs_tol`. Throws ToleranceError once `max_subdivisions` panels exist.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, const std::vector<Scalar>& breakpoints,
                                            Scalar abs_tol, int max_subdivisions) {
  if (breakpoints.size() < 2 || !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw ConfigError("integrate_adaptive: need at least two ascending breakpoints");
  }
  std::priority_queue<detail::Panel<Scalar>> panels;
  Scalar total_error = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    auto p = detail::gauss_kronrod_15<Scalar>(f, breakpoints[i], breakpoints[i + 1]);
    total_error += p.error;
    panels.push(p);
  }
  int count = static_cast<int>(panels.size());
  while (total_error > abs_tol) {
    if (count >= max_subdivisions) {
      throw ToleranceError("integrate_adaptive: " + std::to_string(count) +
                           " panels did not reach tolerance");
    }
    const auto worst = panels.top();
    panels.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    auto left = detail::gauss_kronrod_15<Scalar>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<Scalar>(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Sum smallest-first for a slightly better rounding profile.
  std::vector<Scalar> values;
  values.reserve(panels.size());
  Scalar err = 0;
  while (!panels.empty()) {
    values.push_back(panels.top().value);
    err += panels.top().error;
    panels.pop();
  }
  std::sort(values.begin(), values.end(), [](Scalar l, Scalar r) {
    using std::abs;
    return abs(l) < abs(r);
  });
  Scalar sum = 0;
  for (Scalar v : values) sum += v;
  return {sum, err, count};
}

}  // namespace slitsim
