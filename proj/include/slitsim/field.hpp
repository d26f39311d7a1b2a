#pragma once

// Electrostatic force of a uniformly charged plane x = 0 with a slit |y| < R,
// acting on a point charge moving in the z = 0 plane. All quantities are in
// dimensionless model units; the charges enter only through q*sigma.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "slitsim/error.hpp"
#include "slitsim/quadrature.hpp"

namespace slitsim {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

template <typename Scalar>
struct FieldParams {
  Scalar charge_product{-1};   // q*sigma
  Scalar slit_half_height{5};  // R

  void validate() const {
    using std::isfinite;
    if (!isfinite(charge_product)) throw ConfigError("charge_product must be finite");
    if (!(slit_half_height > 0) || !isfinite(slit_half_height)) {
      throw ConfigError("slit_half_height must be positive and finite");
    }
  }
};

template <typename Scalar>
struct QuadratureSpec {
  Scalar truncation_half_width{1e10};  // y' is integrated over [-Y, -R] and [R, Y]
  Scalar abs_tol{1e-11};
  int max_subdivisions{4000};
};

template <typename Scalar>
bool is_finite(const Vec2<Scalar>& p) {
  using std::isfinite;
  return isfinite(p.x()) && isfinite(p.y());
}

template <typename Scalar>
bool on_screen(const Vec2<Scalar>& p, Scalar slit_half_height) {
  using std::abs;
  return p.x() == 0 && abs(p.y()) >= slit_half_height;
}

namespace detail {

template <typename Scalar>
void check_field_point(const Vec2<Scalar>& p, const FieldParams<Scalar>& params) {
  if (!is_finite(p)) throw DomainError("field evaluated at a non-finite point");
  if (on_screen(p, params.slit_half_height)) {
    throw DomainError("field evaluated on the screen surface");
  }
}

template <typename Scalar>
Scalar sign(Scalar v) {
  return v > 0 ? Scalar(1) : (v < 0 ? Scalar(-1) : Scalar(0));
}

}  // namespace detail

/// Closed-form force on the charge at `p`.
///
///   F_x = 2 q sigma (sign(x) pi + atan((y - R)/x) - atan((y + R)/x))
///   F_y = q sigma ln[(x^2 + (R - y)^2) / (x^2 + (R + y)^2)]
///
/// The sign(x) on the pi term makes the expression valid on both sides of the
/// plane. Inside the slit (x = 0, |y| < R) F_x is its limit, zero.
///
/// Evaluated on |y| so that F(x, -y) = (F_x, -F_y) holds bit for bit.
template <typename Scalar>
Vec2<Scalar> force_closed_form(const Vec2<Scalar>& p, const FieldParams<Scalar>& params) {
  using std::abs;
  using std::atan;
  using std::log;
  detail::check_field_point(p, params);
  const Scalar x = p.x();
  const Scalar ay = abs(p.y());
  const Scalar r = params.slit_half_height;
  const Scalar qs = params.charge_product;
  const Scalar pi = std::numbers::pi_v<Scalar>;

  Scalar fx = 0;
  if (x != 0) {
    fx = 2 * qs * (detail::sign(x) * pi + atan((ay - r) / x) - atan((ay + r) / x));
  }
  const Scalar x2 = x * x;
  const Scalar fy = detail::sign(p.y()) * qs *
                    log((x2 + (r - ay) * (r - ay)) / (x2 + (r + ay) * (r + ay)));
  return {fx, fy};
}

/// Force by direct numerical integration of the z'-reduced Coulomb integrands
/// over the screen, y' in [-Y, -R] U [R, Y]. The cutoff is symmetric so the
/// logarithmic divergence of the two half-lines in F_y cancels; the residual
/// truncation error is O(|p| / Y).
template <typename Scalar>
Vec2<Scalar> force_quadrature(const Vec2<Scalar>& p, const FieldParams<Scalar>& params,
                              const QuadratureSpec<Scalar>& spec = {}) {
  using std::abs;
  detail::check_field_point(p, params);
  const Scalar r = params.slit_half_height;
  const Scalar cutoff = spec.truncation_half_width;
  if (!(cutoff > r)) throw ConfigError("truncation_half_width must exceed slit_half_height");
  if (!(spec.abs_tol > 0)) throw ConfigError("abs_tol must be positive");
  if (params.charge_product == 0) return Vec2<Scalar>::Zero();

  const Scalar x = p.x();
  const Scalar y = p.y();
  const Scalar x2 = x * x;
  auto fx_density = [&](Scalar yp) {
    const Scalar dy = y - yp;
    return 2 * x / (x2 + dy * dy);
  };
  auto fy_density = [&](Scalar yp) {
    const Scalar dy = y - yp;
    return 2 * dy / (x2 + dy * dy);
  };

  // Geometric partition of [R, Y] refined around the integrand peak at y' = |y|.
  auto half_line_breaks = [&](Scalar peak) {
    std::vector<Scalar> b{r};
    const Scalar width = abs(x) > 0 ? abs(x) : Scalar(1);
    if (peak > r) {
      for (Scalar k : {Scalar(-4), Scalar(-1), Scalar(0), Scalar(1), Scalar(4)}) {
        const Scalar c = peak + k * width;
        if (c > r && c < cutoff) b.push_back(c);
      }
    }
    for (Scalar c = 2 * r; c < cutoff; c *= 2) b.push_back(c);
    b.push_back(cutoff);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  };

  const auto upper = half_line_breaks(y);
  auto lower = half_line_breaks(-y);
  for (auto& v : lower) v = -v;
  std::reverse(lower.begin(), lower.end());

  auto integrate = [&](auto& density) {
    const auto hi = integrate_adaptive<Scalar>(density, upper, spec.abs_tol / 2,
                                               spec.max_subdivisions);
    const auto lo = integrate_adaptive<Scalar>(density, lower, spec.abs_tol / 2,
                                               spec.max_subdivisions);
    return hi.value + lo.value;
  };
  const Scalar qs = params.charge_product;
  return {x == 0 ? Scalar(0) : qs * integrate(fx_density), qs * integrate(fy_density)};
}

/// Electrostatic potential energy with reference V(0, 0) = 0, i.e. minus the
/// work done by the field along (0,0) -> (x,0) -> (x,y). That path meets the
/// plane x = 0 only at the origin, which lies inside the slit.
template <typename Scalar>
Scalar potential(const Vec2<Scalar>& p, const FieldParams<Scalar>& params) {
  using std::abs;
  using std::atan;
  using std::log;
  detail::check_field_point(p, params);
  const Scalar x = p.x();
  const Scalar y = p.y();
  const Scalar r = params.slit_half_height;
  const Scalar qs = params.charge_product;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar ax = abs(x);
  const Scalar x2 = x * x;

  Scalar along_axis = 0;
  if (ax > 0) {
    along_axis = -2 * qs * (pi * ax - 2 * ax * atan(r / ax) - r * log((x2 + r * r) / (r * r)));
  }

  // Antiderivative of ln(x^2 + a^2) with respect to a.
  auto g = [&](Scalar a) -> Scalar {
    if (ax > 0) return a * log(x2 + a * a) - 2 * a + 2 * ax * atan(a / ax);
    return a == 0 ? Scalar(0) : a * log(a * a) - 2 * a;
  };
  const Scalar vertical = -qs * (2 * g(r) - g(r - y) - g(r + y));
  return along_axis + vertical;
}

}  // namespace slitsim
