#pragma once

namespace randgas {

// Normalization constant c of the bump function phi(x) = c*exp(-1/(1-x^2)),
// chosen so that phi integrates to 1 over (-1,1). Computed once by adaptive
// quadrature and cached.
double mollifier_normalization();

// delta_a(x) = phi(x/a)/a: smooth compactly-supported approximation of the
// Dirac delta with support (-a, a) and unit integral.
double mollifier(double x, double a);

// H_a(x) = integral of delta_a over (-inf, x]: smooth CDF ramp, 0 below -a,
// 1 above +a, exactly 0.5 at x = 0.
double mollifier_cdf(double x, double a);

} // namespace randgas
