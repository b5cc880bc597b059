#include "randgas/mollifier.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace randgas {
namespace {

// Unnormalized bump: exp(-1/(1-x^2)) on (-1,1), zero outside. All derivatives
// vanish at the endpoints, so the extension by zero is smooth.
double bump(double x) {
  const double t = 1.0 - x * x;
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t);
}

double adaptive_simpson(double (*f)(double), double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_bump(double a, double b, double tol) {
  const double fa = bump(a);
  const double fb = bump(b);
  const double m = 0.5 * (a + b);
  const double fm = bump(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(&bump, a, b, fa, fm, fb, whole, tol, 48);
}

// Cumulative table of the normalized bump on [-1, 1]: cdf_table[k] holds the
// integral from -1 to node k. Panel increments are computed independently and
// accumulated, so the table is nondecreasing by construction (every panel
// integral of a nonnegative integrand is nonnegative).
constexpr int kPanels = 4096;

const std::vector<double>& cdf_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kPanels + 1, 0.0);
    const double width = 2.0 / kPanels;
    for (int k = 1; k <= kPanels; ++k) {
      const double lo = -1.0 + (k - 1) * width;
      t[k] = t[k - 1] + integrate_bump(lo, lo + width, 1e-17);
    }
    // Normalize so the table ends exactly at 1.
    const double total = t[kPanels];
    for (double& v : t) v /= total;
    return t;
  }();
  return table;
}

// Integral of the *normalized* bump from a panel node to x inside that panel,
// by 5-node Gauss-Legendre (panel widths are ~5e-4, so this is far below
// double rounding for the smooth bump).
double partial_panel(double lo, double x) {
  static const std::array<double, 5> node = {
      -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
      0.9061798459386640};
  static const std::array<double, 5> wgt = {
      0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
      0.4786286704993665, 0.2369268850561891};
  const double h = 0.5 * (x - lo);
  const double mid = 0.5 * (x + lo);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += wgt[i] * bump(mid + h * node[i]);
  return s * h * mollifier_normalization();
}

} // namespace

double mollifier_normalization() {
  static const double c = 1.0 / integrate_bump(-1.0, 1.0, 1e-15);
  return c;
}

double mollifier(double x, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("mollifier: width a must be > 0");
  return mollifier_normalization() * bump(x / a) / a;
}

double mollifier_cdf(double x, double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("mollifier_cdf: width a must be > 0");
  }
  const double t = x / a;
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const std::vector<double>& table = cdf_table();
  const double pos = (t + 1.0) / 2.0 * kPanels;
  int k = static_cast<int>(pos);
  if (k >= kPanels) k = kPanels - 1;
  const double lo = -1.0 + k * (2.0 / kPanels);
  double v = table[k] + partial_panel(lo, t);
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return v;
}

} // namespace randgas
