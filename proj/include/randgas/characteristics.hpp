#pragma once

#include <vector>

#include "randgas/geometry.hpp"

namespace randgas {

// Two-sphere density transported along a straight-line (free-flight)
// characteristic through the contact zone. F0 is the incoming density value;
// F0_prime is the value carried on the velocity-exchanged characteristic that
// feeds the gain term during the traversal.
struct CharacteristicProblem {
  Vec3 x0{0, 0, 0};
  Vec3 y0{0, 0, 0};
  Vec3 v{0, 0, 0};
  Vec3 w{0, 0, 0};
  double lambda = 1.0;
  double alpha = 0.1;
  double sigma = 1.0;
  double F0 = 1.0;
  double F0_prime = 0.0;
};

void validate(const CharacteristicProblem& prob);

struct ProfilePoint {
  double s = 0.0;          // time along the characteristic
  double separation = 0.0; // |x(s) - y(s)|
  double F = 0.0;
};

// Pair separation at parameter s under free flight.
double characteristic_separation(const CharacteristicProblem& prob, double s);

// Loss-only decay along the inward leg: F(s) = F0 * exp(lambda * (H(d(s) -
// sigma) - H(d0 - sigma))) with H the mollifier CDF ramp of half-width
// alpha*sigma. The grid covers [zone entry - margin, inward end + margin],
// where the inward end is the exit through the inner boundary, or the point
// of closest approach when the inner boundary is never reached.
std::vector<ProfilePoint> traverse_inward(const CharacteristicProblem& prob,
                                          int n_grid = 1000);

// Density value after a complete crossing of the contact zone, including the
// gain term fed by F0_prime: exp(-lambda)*F0 + (1 - exp(-lambda))*F0_prime.
double traverse_full(const CharacteristicProblem& prob);

} // namespace randgas
