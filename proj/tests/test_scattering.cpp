#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "slitsim/scattering.hpp"
#include "test_support.hpp"

using namespace slitsim;
using testing::deg;

namespace {

TrajectoryRecord discrete(double alpha_deg, double v0, double tau, bool record = false,
                          FieldParams<double> f = testing::default_field(),
                          Geometry g = testing::default_geometry()) {
  return run_discrete_trajectory(deg(alpha_deg), v0, g, f, testing::default_step(tau), record);
}

TrajectoryRecord continuous(double alpha_deg, double v0, FieldParams<double> f = testing::default_field()) {
  const Geometry g = testing::default_geometry();
  return run_continuous_trajectory(deg(alpha_deg), v0, g, f, 1.0,
                                   default_reference_step(g.emitter_distance, v0));
}

ParticleStated at(double x, double y, double t = 0) {
  ParticleStated s;
  s.pos = Vec2d{x, y};
  s.t = t;
  return s;
}

// Mirror image of an outcome; tags are preserved, y values negated.
bool mirrored(const Outcome& a, const Outcome& b) {
  if (a.index() != b.index()) return false;
  if (auto* p = std::get_if<Blocked>(&a)) return std::get<Blocked>(b).y_impact == -p->y_impact;
  if (auto* p = std::get_if<Detected>(&a)) {
    const auto& q = std::get<Detected>(b);
    return q.y_hit == -p->y_hit && q.t_hit == p->t_hit;
  }
  return true;
}

}  // namespace

TEST_CASE("launch state") {
  const auto s = launch_state(deg(30), 12, testing::default_geometry());
  CHECK(s.pos.x() == -5.0);
  CHECK(s.pos.y() == 0.0);
  CHECK(s.vel.x() == doctest::Approx(12 * std::sqrt(3.0) / 2));
  CHECK(s.vel.y() == doctest::Approx(6.0));
  CHECK(s.t == 0.0);
}

TEST_CASE("segment crossing rules") {
  const Geometry g = testing::default_geometry();
  SUBCASE("crossing the screen outside the aperture blocks at the interpolated y") {
    const auto o = segment_outcome(at(-1, 4), at(1, 6), g);
    REQUIRE(o);
    CHECK(std::get<Blocked>(*o).y_impact == doctest::Approx(5.0));
    // Right at the aperture edge counts as blocked.
    const auto edge = segment_outcome(at(-1, 4.8), at(1, 4.8), g);
    REQUIRE(edge);
    CHECK(std::holds_alternative<Blocked>(*edge));
    // From the right as well.
    CHECK(std::holds_alternative<Blocked>(*segment_outcome(at(1, -6), at(-1, -6), g)));
  }
  SUBCASE("passing inside the aperture is no event") {
    CHECK_FALSE(segment_outcome(at(-1, 4.7), at(1, 4.7), g));
    CHECK_FALSE(segment_outcome(at(-1, 0), at(0, 0), g));
  }
  SUBCASE("detector crossing interpolates y and t") {
    const auto o = segment_outcome(at(24, 1, 2.0), at(26, 3, 2.5), g);
    REQUIRE(o);
    const auto d = std::get<Detected>(*o);
    CHECK(d.y_hit == doctest::Approx(2.0));
    CHECK(d.t_hit == doctest::Approx(2.25));
  }
  SUBCASE("a single long step through the slit and past the detector") {
    CHECK(std::holds_alternative<Detected>(*segment_outcome(at(-5, 0), at(30, 3.5), g)));
    CHECK(std::holds_alternative<Blocked>(*segment_outcome(at(-5, 0), at(30, 35), g)));
  }
  SUBCASE("escape bounds") {
    CHECK(std::holds_alternative<Escaped>(*segment_outcome(at(3, 49), at(3, 51), g)));
    CHECK(std::holds_alternative<Escaped>(*segment_outcome(at(-9, 0), at(-10.5, 0), g)));
    CHECK_FALSE(segment_outcome(at(-9, 49), at(-9.5, 50), g));
  }
}

TEST_CASE("geometry validation and consistency with the field") {
  Geometry g = testing::default_geometry();
  CHECK_NOTHROW(check_consistent(g, testing::default_field()));
  CHECK_THROWS_AS(check_consistent(g, FieldParams<double>{-1.0, 4.0}), ConfigError);
  CHECK_THROWS_AS(run_discrete_trajectory(0.0, 12, g, FieldParams<double>{-1.0, 4.0},
                                          testing::default_step()),
                  ConfigError);
  g.particle_radius = 5;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = testing::default_geometry();
  g.y_bound = 4;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = testing::default_geometry();
  g.max_steps = 0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  CHECK_THROWS_AS(discrete(0, -1, 0.05), ConfigError);
}

TEST_CASE("on-axis launch at the default speed stays on the axis and never reaches the detector") {
  for (double tau : {0.05, 0.01}) {
    const auto rec = discrete(0, testing::kDefaultV0, tau, true);
    REQUIRE(rec.path);
    for (const auto& s : *rec.path) REQUIRE(s.pos.y() == 0.0);
    CHECK(std::holds_alternative<Escaped>(rec.outcome));
    double x_max = -1e9;
    for (const auto& s : *rec.path) x_max = std::max(x_max, s.pos.x());
    CHECK(x_max > 0);   // goes through the slit
    CHECK(x_max < 25);  // turns back before the detector
  }
  CHECK(std::holds_alternative<Escaped>(continuous(0, testing::kDefaultV0).outcome));
}

TEST_CASE("on-axis launch with enough energy hits the detector centre") {
  const auto d = discrete(0, testing::kReachingV0, 0.05);
  REQUIRE(is_detected(d.outcome));
  CHECK(std::get<Detected>(d.outcome).y_hit == 0.0);
  const auto c = continuous(0, testing::kReachingV0);
  REQUIRE(is_detected(c.outcome));
  CHECK(std::get<Detected>(c.outcome).y_hit == 0.0);
}

TEST_CASE("steep launch is blocked by the screen") {
  const auto d = discrete(45, testing::kDefaultV0, 0.05);
  REQUIRE(std::holds_alternative<Blocked>(d.outcome));
  CHECK(std::abs(std::get<Blocked>(d.outcome).y_impact) >= 4.8);
  CHECK(std::holds_alternative<Blocked>(continuous(45, testing::kDefaultV0).outcome));
}

TEST_CASE("free flight lands on the straight line") {
  const FieldParams<double> free{0.0, 5.0};
  for (double a : {0.0, 5.0, -12.0, 30.0, 40.0}) {
    const double expect = 30.0 * std::tan(deg(a));
    const auto c = continuous(a, 12, free);
    REQUIRE(is_detected(c.outcome));
    CHECK(std::get<Detected>(c.outcome).y_hit == doctest::Approx(expect).epsilon(1e-9));
    const auto d = discrete(a, 12, 0.05, false, free);
    REQUIRE(is_detected(d.outcome));
    CHECK(std::get<Detected>(d.outcome).y_hit == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("outcomes mirror under alpha -> -alpha") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(-45.5, 45.5);
  for (int i = 0; i < 200; ++i) {
    const double a = ua(rng);
    const double v0 = i % 2 ? testing::kDefaultV0 : testing::kReachingV0;
    const auto p = discrete(a, v0, 0.05);
    const auto m = discrete(-a, v0, 0.05);
    REQUIRE(mirrored(p.outcome, m.outcome));
    REQUIRE(p.steps_taken == m.steps_taken);
  }
}

TEST_CASE("fine tau agrees with the continuous limit") {
  for (double a : {3.0, -7.0, 12.0}) {
    const auto d = discrete(a, testing::kReachingV0, 0.001);
    const auto c = continuous(a, testing::kReachingV0);
    REQUIRE(is_detected(c.outcome));
    REQUIRE(is_detected(d.outcome));
    CHECK(std::abs(std::get<Detected>(d.outcome).y_hit - std::get<Detected>(c.outcome).y_hit) <= 0.05);
  }
}

TEST_CASE("random angles: tau = 5e-4 agrees with the continuous limit") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(-45.5, 45.5);
  int compared = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = ua(rng);
    const auto d = discrete(a, testing::kReachingV0, 5e-4);
    const auto c = continuous(a, testing::kReachingV0);
    CHECK(std::string(outcome_name(d.outcome)) == outcome_name(c.outcome));
    if (is_detected(d.outcome) && is_detected(c.outcome)) {
      ++compared;
      CHECK(std::abs(std::get<Detected>(d.outcome).y_hit - std::get<Detected>(c.outcome).y_hit) <= 0.02);
    }
  }
  CHECK(compared >= 5);
}

TEST_CASE("no tunneling at coarse tau") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(-45.5, 45.5);
  const Geometry g = testing::default_geometry();
  for (double tau : {0.05, 0.2, 0.5, 1.0}) {
    for (int i = 0; i < 100; ++i) {
      const auto rec = discrete(ua(rng), testing::kReachingV0, tau, true);
      REQUIRE(rec.path);
      REQUIRE(rec.steps_taken <= g.max_steps);
      if (!is_detected(rec.outcome)) continue;
      const auto& p = *rec.path;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        const double xa = p[k].pos.x(), xb = p[k + 1].pos.x();
        if ((xa < 0 && xb >= 0) || (xa > 0 && xb <= 0)) {
          const double y = p[k].pos.y() + xa / (xa - xb) * (p[k + 1].pos.y() - p[k].pos.y());
          REQUIRE(std::abs(y) < g.aperture());
        }
      }
      REQUIRE(p.back().pos.x() == doctest::Approx(g.screen_gap));
    }
  }
}

TEST_CASE("step budget exhaustion is reported") {
  Geometry g = testing::default_geometry();
  g.max_steps = 3;
  const auto rec = discrete(10, 12, 0.05, true, testing::default_field(), g);
  CHECK(std::holds_alternative<StepLimit>(rec.outcome));
  CHECK(rec.steps_taken == 3);
  CHECK(rec.path->size() == 4);
  CHECK(std::string(outcome_name(rec.outcome)) == "steplimit");
}

TEST_CASE("recorded path starts at the emitter and ends at the crossing") {
  const auto rec = discrete(5, testing::kReachingV0, 0.05, true);
  REQUIRE(rec.path);
  CHECK(rec.path->front().pos.x() == -5.0);
  CHECK(rec.path->size() == rec.steps_taken + 1);
  REQUIRE(is_detected(rec.outcome));
  CHECK(rec.path->back().pos.x() == doctest::Approx(25.0));
  CHECK(rec.path->back().pos.y() == doctest::Approx(std::get<Detected>(rec.outcome).y_hit));
  CHECK_FALSE(discrete(5, testing::kReachingV0, 0.05, false).path);
}
