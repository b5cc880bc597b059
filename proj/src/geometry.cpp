#include "randgas/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace randgas {

void validate(const ContactParams& p) {
  if (!(p.sigma > 0.0)) {
    throw std::invalid_argument("ContactParams: sigma must be > 0");
  }
  if (!(p.alpha > 0.0 && p.alpha <= 0.5)) {
    throw std::invalid_argument("ContactParams: alpha must lie in (0, 0.5]");
  }
  if (!(p.lambda >= 0.0)) {
    throw std::invalid_argument("ContactParams: lambda must be >= 0");
  }
  if (!(p.rho_sp > 0.0)) {
    throw std::invalid_argument("ContactParams: rho_sp must be > 0");
  }
}

void validate(const Box3& box, const ContactParams& p) {
  validate(p);
  const double min_side = box.side_lengths.minCoeff();
  if (!(min_side > 0.0)) {
    throw std::invalid_argument("Box3: side lengths must be > 0");
  }
  if (!(p.sigma * (1.0 + p.alpha) < 0.5 * min_side)) {
    throw std::invalid_argument(
        "Box3: each side must exceed 2*sigma*(1+alpha) so that the contact "
        "zone is unambiguous under the minimum image");
  }
}

namespace {

double wrap_component(double d, double side) {
  double t = std::fmod(d, side);
  if (t > 0.5 * side) t -= side;
  if (t <= -0.5 * side) t += side;
  return t;
}

} // namespace

Vec3 min_image(const Vec3& x, const Vec3& y, const Box3& box) {
  Vec3 d = x - y;
  if (!box.periodic) return d;
  for (int i = 0; i < 3; ++i) {
    d[i] = wrap_component(d[i], box.side_lengths[i]);
  }
  return d;
}

Vec3 wrap_position(const Vec3& x, const Box3& box) {
  Vec3 out = x;
  for (int i = 0; i < 3; ++i) {
    const double side = box.side_lengths[i];
    out[i] -= side * std::floor(out[i] / side);
    if (out[i] >= side) out[i] -= side; // guards the floor rounding edge
  }
  return out;
}

std::pair<Vec3, Vec3> collide(const Vec3& v, const Vec3& w, const Vec3& n) {
  if (std::abs(n.squaredNorm() - 1.0) > 2e-12) {
    throw std::invalid_argument("collide: n must be a unit vector");
  }
  // Exchange the normal components rather than adding/subtracting a shared
  // increment: v' + w' then regroups the same four addends as v + w, and a
  // coordinate-axis normal swaps the component exactly.
  const Vec3 pv = v.dot(n) * n;
  const Vec3 pw = w.dot(n) * n;
  return {(v - pv) + pw, (w - pw) + pv};
}

std::pair<Vec3, Vec3> collide_coords(const Vec3& x, const Vec3& y,
                                     const Vec3& v, const Vec3& w) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (!(r > 0.0)) {
    throw std::invalid_argument("collide_coords: coincident centers");
  }
  return collide(v, w, Vec3(d / r));
}

std::pair<Vec3, Vec3> collide_coords(const Vec3& x, const Vec3& y,
                                     const Vec3& v, const Vec3& w,
                                     const Box3& box) {
  const Vec3 d = min_image(x, y, box);
  const double r = d.norm();
  if (!(r > 0.0)) {
    throw std::invalid_argument("collide_coords: coincident centers");
  }
  return collide(v, w, Vec3(d / r));
}

} // namespace randgas
