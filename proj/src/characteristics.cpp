#include "randgas/characteristics.hpp"

#include <cmath>
#include <stdexcept>

#include "randgas/mollifier.hpp"

namespace randgas {

void validate(const CharacteristicProblem& prob) {
  if (!(prob.sigma > 0.0) || !(prob.alpha > 0.0 && prob.alpha < 1.0) ||
      !(prob.lambda >= 0.0)) {
    throw std::invalid_argument("CharacteristicProblem: bad parameters");
  }
  if (!(prob.F0 > 0.0) || !(prob.F0_prime >= 0.0)) {
    throw std::invalid_argument("CharacteristicProblem: bad density data");
  }
  const Vec3 b = prob.x0 - prob.y0;
  const Vec3 g = prob.v - prob.w;
  if (!(b.norm() > prob.sigma * (1.0 + prob.alpha))) {
    throw std::invalid_argument(
        "CharacteristicProblem: must start outside the contact zone");
  }
  if (!(b.dot(g) < 0.0)) {
    throw std::invalid_argument(
        "CharacteristicProblem: spheres must be approaching");
  }
}

double characteristic_separation(const CharacteristicProblem& prob, double s) {
  return ((prob.x0 - prob.y0) + s * (prob.v - prob.w)).norm();
}

namespace {

// Solve |b + g s| = r for the in-bound crossing times; quadratic in s.
// Returns false when the line never reaches separation r.
bool crossing_times(const Vec3& b, const Vec3& g, double r, double* s_lo,
                    double* s_hi) {
  const double a2 = g.squaredNorm();
  const double a1 = 2.0 * b.dot(g);
  const double a0 = b.squaredNorm() - r * r;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return false;
  const double root = std::sqrt(disc);
  *s_lo = (-a1 - root) / (2.0 * a2);
  *s_hi = (-a1 + root) / (2.0 * a2);
  return true;
}

} // namespace

std::vector<ProfilePoint> traverse_inward(const CharacteristicProblem& prob,
                                          int n_grid) {
  validate(prob);
  if (n_grid < 2) throw std::invalid_argument("traverse_inward: n_grid >= 2");
  const Vec3 b = prob.x0 - prob.y0;
  const Vec3 g = prob.v - prob.w;
  const double a = prob.alpha * prob.sigma;

  double s_entry, s_unused;
  if (!crossing_times(b, g, prob.sigma * (1.0 + prob.alpha), &s_entry,
                      &s_unused) ||
      s_entry <= 0.0) {
    throw std::invalid_argument(
        "traverse_inward: characteristic never enters the contact zone");
  }
  // Inward leg ends at the inner boundary when the line pierces it, else at
  // the closest approach.
  double s_end;
  double inner_lo, inner_hi;
  if (crossing_times(b, g, prob.sigma * (1.0 - prob.alpha), &inner_lo,
                     &inner_hi) &&
      inner_lo > s_entry) {
    s_end = inner_lo;
  } else {
    s_end = -b.dot(g) / g.squaredNorm(); // closest approach
  }
  const double margin = 0.1 * (s_end - s_entry);
  const double s0 = s_entry - margin;
  const double s1 = s_end + margin;

  const double h0 = mollifier_cdf(characteristic_separation(prob, 0.0) -
                                      prob.sigma,
                                  a);
  std::vector<ProfilePoint> profile(n_grid);
  for (int k = 0; k < n_grid; ++k) {
    const double s = s0 + (s1 - s0) * k / (n_grid - 1);
    const double d = characteristic_separation(prob, s);
    const double h = mollifier_cdf(d - prob.sigma, a);
    profile[k] = {s, d, prob.F0 * std::exp(prob.lambda * (h - h0))};
  }
  return profile;
}

double traverse_full(const CharacteristicProblem& prob) {
  validate(prob);
  const double decay = std::exp(-prob.lambda);
  return decay * prob.F0 + (1.0 - decay) * prob.F0_prime;
}

} // namespace randgas
