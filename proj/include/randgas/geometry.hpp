#pragma once

#include <Eigen/Dense>
#include <utility>

namespace randgas {

using Vec3 = Eigen::Vector3d;

// Rectangular periodic box. Sides must be strictly positive; v1 supports
// periodic boundaries only.
struct Box3 {
  Vec3 side_lengths{1.0, 1.0, 1.0};
  bool periodic = true;

  [[nodiscard]] double volume() const {
    return side_lengths.x() * side_lengths.y() * side_lengths.z();
  }
};

// Parameters of the pairwise contact process: sphere diameter sigma, contact
// zone half-width alpha*sigma, collision intensity scale lambda, and the mass
// density of a single sphere rho_sp.
struct ContactParams {
  double sigma = 1.0;
  double alpha = 0.1;
  double lambda = 1.0;
  double rho_sp = 1.0;
};

void validate(const ContactParams& p);
void validate(const Box3& box, const ContactParams& p);

// Displacement x - y wrapped into the box so each component lies in
// (-side/2, +side/2]; the tie at exactly side/2 picks the positive sign.
Vec3 min_image(const Vec3& x, const Vec3& y, const Box3& box);

// Wrap a position into [0, side) componentwise.
Vec3 wrap_position(const Vec3& x, const Box3& box);

// Exchange of the velocity components along the unit vector n:
//   v' = v + ((w-v).n) n,  w' = w - ((w-v).n) n.
// Momentum is conserved bitwise (the same product is added and subtracted);
// kinetic energy is conserved up to rounding.
std::pair<Vec3, Vec3> collide(const Vec3& v, const Vec3& w, const Vec3& n);

// collide() with n taken from the direction between centers, n = (x-y)/|x-y|.
std::pair<Vec3, Vec3> collide_coords(const Vec3& x, const Vec3& y,
                                     const Vec3& v, const Vec3& w);

// Same, but the center displacement is the minimum image in a periodic box.
std::pair<Vec3, Vec3> collide_coords(const Vec3& x, const Vec3& y,
                                     const Vec3& v, const Vec3& w,
                                     const Box3& box);

} // namespace randgas
