#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace randgas {

enum class Boundary { periodic, transmissive };
enum class RhsMode { euler, navier_stokes };

// One-dimensional planar grid of primitive fields. Cell i is centered at
// x = (i + 1/2) dx. Transverse velocity components are identically zero.
// rho_sp is the close-packing density scale entering x = rho / rho_sp;
// rho_sp = +inf reproduces the classical dilute equations bitwise.
// R_star, when nonzero, multiplies the dense pressure correction by
// (1 + sigma * R_star) — the first-order contact-correlation correction,
// off by default.
struct HydroState1D {
  int n_cells = 0;
  double dx = 0.0;
  Eigen::ArrayXd rho;
  Eigen::ArrayXd u;
  Eigen::ArrayXd theta;
  double rho_sp = std::numeric_limits<double>::infinity();
  double sigma = 1.0;
  double time = 0.0;
  Boundary bc = Boundary::periodic;
  double R_star = 0.0;
};

void validate(const HydroState1D& state);

// Totals of the conserved densities times dx (mass, momentum, energy).
struct ConservedTotals {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
};
ConservedTotals conserved_totals(const HydroState1D& state);

// Dense-gas transport coefficients at x = rho / rho_sp:
//   a1 = (16x/5)(1 + (4x/5)(1 + 12/pi))
//   a2 = (16x/5)(1 + (4x/5)(1 - 18/pi))
//   a3 = (24x/5)(1 + (2x/15)(9 + 32/pi))
//   mu = (5 sqrt(pi)/96) rho_sp sigma sqrt(theta)
//   pressure_factor = 1 + 4x   (p = rho theta pressure_factor)
struct TransportCoeffs {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double mu = 0.0;
  double pressure_factor = 1.0;
};
TransportCoeffs coeffs(double rho, double theta, double rho_sp, double sigma);

struct Tendency {
  Eigen::ArrayXd d_rho;
  Eigen::ArrayXd d_mom;
  Eigen::ArrayXd d_energy;
};

// Hyperbolic part: conservative divergence of the fluxes
//   (rho u, rho u^2 + p, (E + p) u),  p = rho theta (1 + 4x),
// with a Rusanov interface flux and optional minmod-limited linear
// reconstruction of the conserved variables.
Tendency euler_rhs(const HydroState1D& state, bool minmod = false);

// euler_rhs plus central-difference viscous stress and heat conduction:
//   stress   tau = mu [2(1+a1) - (2/3)(1+a2)] du/dx
//   heat flux  Q = (15/4) mu (1+a3) dtheta/dx
// (see docs/hydro-planar-reduction.md for the planar tensor contraction).
Tendency ns_rhs(const HydroState1D& state, bool minmod = false);

// Largest |u| + c over cells. The Rusanov bound uses
//   c^2 = (5/3) theta pressure_factor^2,
// which dominates the exact isentropic slope
//   c_exact^2 = theta [(1 + 8x) + (2/3)(1 + 4x)^2]
// for every x >= 0: the difference is
//   theta [(5/3)(1+4x)^2 - (1+8x) - (2/3)(1+4x)^2] = theta [(1+4x)^2 - 1 - 8x]
//   = 16 theta x^2 >= 0,
// with equality at x = 0 where both reduce to the classical sqrt(5 theta/3).
double max_wave_speed(const HydroState1D& state);

// Largest effective diffusivity (momentum and thermal) for the viscous CFL.
double max_diffusivity(const HydroState1D& state);

// SSP-RK2 time integration to t_end with
//   dt = cfl * min(dx / max(|u|+c), dx^2 / (2 nu_max)),
// the diffusive limit applying in Navier-Stokes mode only. Positivity
// failures abort with the offending cell in the message.
HydroState1D advance(HydroState1D state, double t_end, double cfl,
                     RhsMode mode = RhsMode::euler, bool minmod = false);

// Exact solution of the classical (dilute, gamma = 5/3) Riemann problem,
// sampled at positions x (relative to the initial interface) and time t.
// The star-region pressure comes from a bisection root solve of the
// standard pressure function to 1e-10 residual.
struct RiemannStatePrim {
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
};
struct RiemannProfile {
  std::vector<double> rho;
  std::vector<double> u;
  std::vector<double> theta;
};
RiemannProfile riemann_exact_dilute(const RiemannStatePrim& left,
                                    const RiemannStatePrim& right, double t,
                                    const std::vector<double>& x);

} // namespace randgas
