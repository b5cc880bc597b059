#include <cmath>
#include <vector>

#include <doctest.h>

#include "randgas/characteristics.hpp"
#include "randgas/mollifier.hpp"

using randgas::CharacteristicProblem;
using randgas::Vec3;

namespace {

CharacteristicProblem head_on(double lambda, double alpha) {
  CharacteristicProblem prob;
  prob.x0 = Vec3(0, 0, 0);
  prob.y0 = Vec3(2.0, 0, 0);
  prob.v = Vec3(1, 0, 0);
  prob.w = Vec3(-1, 0, 0);
  prob.lambda = lambda;
  prob.alpha = alpha;
  prob.sigma = 1.0;
  prob.F0 = 1.0;
  prob.F0_prime = 0.0;
  return prob;
}

// Independent RK4 integration of dF/ds = lambda * F * d/ds[H(d(s) - sigma)],
// with the H-derivative evaluated by the chain rule through the mollifier.
// Shares only the mollifier primitive with the library, not the solution.
double rk4_final(const CharacteristicProblem& prob, double s0, double s1,
                 int n_steps) {
  const double a = prob.alpha * prob.sigma;
  const Vec3 b = prob.x0 - prob.y0;
  const Vec3 g = prob.v - prob.w;
  auto rate = [&](double s, double f) {
    const Vec3 rel = b + s * g;
    const double d = rel.norm();
    const double dd_ds = rel.dot(g) / d;
    return prob.lambda * f * randgas::mollifier(d - prob.sigma, a) * dd_ds;
  };
  double f = prob.F0;
  const double h = (s1 - s0) / n_steps;
  for (int k = 0; k < n_steps; ++k) {
    const double s = s0 + k * h;
    const double k1 = rate(s, f);
    const double k2 = rate(s + h / 2, f + h / 2 * k1);
    const double k3 = rate(s + h / 2, f + h / 2 * k2);
    const double k4 = rate(s + h, f + h * k3);
    f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return f;
}

} // namespace

TEST_CASE("validation enforces the collision-course preconditions") {
  CharacteristicProblem prob = head_on(1.0, 0.1);
  CHECK_NOTHROW(randgas::validate(prob));
  prob.y0 = Vec3(1.05, 0, 0); // starts inside the zone
  CHECK_THROWS(randgas::validate(prob));
  prob = head_on(1.0, 0.1);
  prob.v = Vec3(-1, 0, 0); // receding
  prob.w = Vec3(1, 0, 0);
  CHECK_THROWS(randgas::validate(prob));
  prob = head_on(1.0, 0.1);
  prob.F0 = 0.0;
  CHECK_THROWS(randgas::validate(prob));
  prob = head_on(-1.0, 0.1);
  CHECK_THROWS(randgas::validate(prob));
}

TEST_CASE("separation along the line is the free-flight distance") {
  const CharacteristicProblem prob = head_on(1.0, 0.1);
  CHECK(randgas::characteristic_separation(prob, 0.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(randgas::characteristic_separation(prob, 0.25) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK(randgas::characteristic_separation(prob, 1.0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("zero intensity transports the density unchanged") {
  const auto profile = randgas::traverse_inward(head_on(0.0, 0.1), 100);
  REQUIRE(profile.size() == 100);
  for (const auto& pt : profile) {
    CHECK(pt.F == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(randgas::traverse_full(head_on(0.0, 0.1)) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("full inward traversal decays by exactly exp(-lambda)") {
  for (double lambda : {0.5, 1.0, 3.0}) {
    const auto profile = randgas::traverse_inward(head_on(lambda, 0.1), 2000);
    // last grid point lies past the inner boundary (margin), where H = 0 and
    // the closed form gives F = exp(-lambda) * F0
    CHECK(profile.back().separation < 0.9);
    CHECK(profile.back().F ==
          doctest::Approx(std::exp(-lambda)).epsilon(1e-12));
    // profile is monotone nonincreasing in s for an inward leg
    for (std::size_t k = 1; k < profile.size(); ++k) {
      CHECK(profile[k].F <= profile[k - 1].F * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("closed-form profile matches an independent RK4 integration") {
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (double alpha : {0.2, 0.05}) {
      const CharacteristicProblem prob = head_on(lambda, alpha);
      const auto profile = randgas::traverse_inward(prob, 1000);
      // integrate from the first grid point (F = F0 there: outside the zone)
      const double s0 = profile.front().s;
      CHECK(profile.front().F == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t k : {profile.size() / 2, profile.size() - 1}) {
        const double f_rk4 = rk4_final(prob, s0, profile[k].s, 4000);
        CHECK(profile[k].F == doctest::Approx(f_rk4).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("off-axis characteristic that misses the core still decays right") {
  // impact parameter 0.97: grazes the zone without piercing the inner
  // boundary; the inward leg ends at closest approach
  CharacteristicProblem prob = head_on(2.0, 0.1);
  prob.x0 = Vec3(0, 0.97, 0);
  const auto profile = randgas::traverse_inward(prob, 1500);
  const double s0 = profile.front().s;
  const double f_rk4 = rk4_final(prob, s0, profile.back().s, 6000);
  CHECK(profile.back().F == doctest::Approx(f_rk4).epsilon(1e-8));
  // decay is partial: H at closest approach is strictly between 0 and 1
  CHECK(profile.back().F > std::exp(-2.0));
  CHECK(profile.back().F < 1.0);
}

TEST_CASE("complete traversal combines both characteristics convexly") {
  CharacteristicProblem prob = head_on(1.0, 0.1);
  prob.F0 = 1.0;
  prob.F0_prime = 2.0;
  CHECK(randgas::traverse_full(prob) == doctest::Approx(1.63212).epsilon(1e-5));
  CHECK(randgas::traverse_full(prob) ==
        doctest::Approx(std::exp(-1.0) * 1.0 + (1.0 - std::exp(-1.0)) * 2.0)
            .epsilon(1e-14));

  // impenetrable limit: lambda = 50 pins the outcome to the exchanged value
  prob.lambda = 50.0;
  CHECK(std::abs(randgas::traverse_full(prob) - 2.0) < 1e-20);

  // monotone in lambda toward F0_prime; convex combination throughout
  double prev = randgas::traverse_full(head_on(0.0, 0.1));
  for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    CharacteristicProblem q = head_on(lambda, 0.1);
    q.F0_prime = 2.0;
    const double f = randgas::traverse_full(q);
    CHECK(f >= prev - 1e-15);
    CHECK(f >= std::min(q.F0, q.F0_prime) - 1e-15);
    CHECK(f <= std::max(q.F0, q.F0_prime) + 1e-15);
    prev = f;
  }
}
