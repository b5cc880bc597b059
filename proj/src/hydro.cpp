#include "randgas/hydro.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace randgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGamma = 5.0 / 3.0;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Effective pressure factor including the optional contact-correlation
// correction: p = rho theta (1 + 4x (1 + sigma R_star)).
double pressure_factor_eff(double rho, const HydroState1D& s) {
  const double x = rho / s.rho_sp;
  return 1.0 + 4.0 * x * (1.0 + s.sigma * s.R_star);
}

struct Conserved {
  Eigen::ArrayXd rho;    // mass density
  Eigen::ArrayXd mom;    // momentum density rho u
  Eigen::ArrayXd energy; // total energy density rho (u^2/2 + 3 theta/2)
};

Conserved to_conserved(const HydroState1D& s) {
  Conserved q;
  q.rho = s.rho;
  q.mom = s.rho * s.u;
  q.energy = s.rho * (0.5 * s.u.square() + 1.5 * s.theta);
  return q;
}

void from_conserved(const Conserved& q, HydroState1D& s, const char* where) {
  for (int i = 0; i < s.n_cells; ++i) {
    const double rho = q.rho(i);
    const double ein = q.energy(i) - 0.5 * q.mom(i) * q.mom(i) / rho;
    if (!(rho > 0.0) || !(ein > 0.0)) {
      std::ostringstream msg;
      msg << "positivity failure in " << where << " at cell " << i
          << " (t=" << s.time << "): rho=" << rho
          << " internal_energy=" << ein;
      throw std::runtime_error(msg.str());
    }
  }
  s.rho = q.rho;
  s.u = q.mom / q.rho;
  s.theta = (q.energy / q.rho - 0.5 * s.u.square()) / 1.5;
}

double minmod2(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return (std::abs(a) < std::abs(b)) ? a : b;
}

// Physical flux of the conserved triple given one cell's conserved values.
void point_flux(double rho, double mom, double energy,
                const HydroState1D& s, double* f, double* speed) {
  const double u = mom / rho;
  const double theta = (energy / rho - 0.5 * u * u) / 1.5;
  const double pf = pressure_factor_eff(rho, s);
  const double p = rho * theta * pf;
  f[0] = mom;
  f[1] = mom * u + p;
  f[2] = (energy + p) * u;
  *speed = std::abs(u) + std::sqrt(kGamma * theta) * pf;
}

// Index helpers applying the boundary rule.
int left_of(int i, int n, Boundary bc) {
  if (i > 0) return i - 1;
  return bc == Boundary::periodic ? n - 1 : 0;
}
int right_of(int i, int n, Boundary bc) {
  if (i < n - 1) return i + 1;
  return bc == Boundary::periodic ? 0 : n - 1;
}

} // namespace

void validate(const HydroState1D& state) {
  require(state.n_cells >= 3, "need at least 3 cells");
  require(state.dx > 0.0 && std::isfinite(state.dx), "dx must be positive");
  require(state.rho.size() == state.n_cells &&
              state.u.size() == state.n_cells &&
              state.theta.size() == state.n_cells,
          "field arrays must have n_cells entries");
  require((state.rho > 0.0).all(), "rho must be positive cellwise");
  require((state.theta > 0.0).all(), "theta must be positive cellwise");
  require(state.rho.allFinite() && state.u.allFinite() &&
              state.theta.allFinite(),
          "fields must be finite");
  require(state.rho_sp > 0.0, "rho_sp must be positive");
  require(state.sigma >= 0.0 && std::isfinite(state.sigma),
          "sigma must be nonnegative");
  require(std::isfinite(state.R_star), "R_star must be finite");
}

ConservedTotals conserved_totals(const HydroState1D& s) {
  const Conserved q = to_conserved(s);
  ConservedTotals t;
  t.mass = q.rho.sum() * s.dx;
  t.momentum = q.mom.sum() * s.dx;
  t.energy = q.energy.sum() * s.dx;
  return t;
}

TransportCoeffs coeffs(double rho, double theta, double rho_sp, double sigma) {
  require(rho > 0.0 && theta > 0.0 && rho_sp > 0.0 && sigma >= 0.0,
          "coeffs: inputs must be positive (sigma nonnegative)");
  const double x = rho / rho_sp;
  TransportCoeffs c;
  c.a1 = (16.0 * x / 5.0) * (1.0 + (4.0 * x / 5.0) * (1.0 + 12.0 / kPi));
  c.a2 = (16.0 * x / 5.0) * (1.0 + (4.0 * x / 5.0) * (1.0 - 18.0 / kPi));
  c.a3 = (24.0 * x / 5.0) * (1.0 + (2.0 * x / 15.0) * (9.0 + 32.0 / kPi));
  c.mu = (5.0 * std::sqrt(kPi) / 96.0) * rho_sp * sigma * std::sqrt(theta);
  c.pressure_factor = 1.0 + 4.0 * x;
  return c;
}

Tendency euler_rhs(const HydroState1D& state, bool minmod) {
  validate(state);
  const int n = state.n_cells;
  const Conserved q = to_conserved(state);

  // Optional minmod-limited linear reconstruction of the conserved fields;
  // slopes vanish at transmissive edges (zero-gradient ghost cells).
  Eigen::ArrayXd slope_rho = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd slope_mom = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd slope_en = Eigen::ArrayXd::Zero(n);
  if (minmod) {
    for (int i = 0; i < n; ++i) {
      const int il = left_of(i, n, state.bc);
      const int ir = right_of(i, n, state.bc);
      slope_rho(i) = minmod2(q.rho(i) - q.rho(il), q.rho(ir) - q.rho(i));
      slope_mom(i) = minmod2(q.mom(i) - q.mom(il), q.mom(ir) - q.mom(i));
      slope_en(i) =
          minmod2(q.energy(i) - q.energy(il), q.energy(ir) - q.energy(i));
    }
  }

  // Rusanov flux at every interface. Interface k sits between cells
  // (k-1, k) for k = 1..n-1; interfaces 0 and n close the domain per bc.
  const int n_faces = n + 1;
  Eigen::ArrayXXd face_flux(3, n_faces);
  auto rusanov = [&](int ileft, int iright, int face) {
    double ql[3], qr[3], fl[3], fr[3], sl, sr;
    ql[0] = q.rho(ileft) + 0.5 * slope_rho(ileft);
    ql[1] = q.mom(ileft) + 0.5 * slope_mom(ileft);
    ql[2] = q.energy(ileft) + 0.5 * slope_en(ileft);
    qr[0] = q.rho(iright) - 0.5 * slope_rho(iright);
    qr[1] = q.mom(iright) - 0.5 * slope_mom(iright);
    qr[2] = q.energy(iright) - 0.5 * slope_en(iright);
    point_flux(ql[0], ql[1], ql[2], state, fl, &sl);
    point_flux(qr[0], qr[1], qr[2], state, fr, &sr);
    const double a = std::max(sl, sr);
    for (int c = 0; c < 3; ++c)
      face_flux(c, face) = 0.5 * (fl[c] + fr[c]) - 0.5 * a * (qr[c] - ql[c]);
  };
  for (int k = 1; k < n; ++k) rusanov(k - 1, k, k);
  if (state.bc == Boundary::periodic) {
    rusanov(n - 1, 0, 0);
    face_flux.col(n) = face_flux.col(0);
  } else {
    // transmissive: the zero-gradient ghost equals the edge cell, so the
    // edge face carries the plain point flux of that cell
    double f[3], s;
    point_flux(q.rho(0), q.mom(0), q.energy(0), state, f, &s);
    for (int c = 0; c < 3; ++c) face_flux(c, 0) = f[c];
    point_flux(q.rho(n - 1), q.mom(n - 1), q.energy(n - 1), state, f, &s);
    for (int c = 0; c < 3; ++c) face_flux(c, n) = f[c];
  }

  Tendency rhs;
  rhs.d_rho.resize(n);
  rhs.d_mom.resize(n);
  rhs.d_energy.resize(n);
  for (int i = 0; i < n; ++i) {
    rhs.d_rho(i) = -(face_flux(0, i + 1) - face_flux(0, i)) / state.dx;
    rhs.d_mom(i) = -(face_flux(1, i + 1) - face_flux(1, i)) / state.dx;
    rhs.d_energy(i) = -(face_flux(2, i + 1) - face_flux(2, i)) / state.dx;
  }
  return rhs;
}

Tendency ns_rhs(const HydroState1D& state, bool minmod) {
  Tendency rhs = euler_rhs(state, minmod);
  const int n = state.n_cells;

  // Central-difference viscous stress and heat flux at faces. In the planar
  // reduction u = (u(x), 0, 0), the deviatoric contraction gives
  //   tau_xx = mu [ (1+a1) * 2 u_x - (2/3)(1+a2) u_x ]
  // and the heat flux (15/4) mu (1+a3) theta_x
  // (full tensor algebra in docs/hydro-planar-reduction.md).
  auto face_terms = [&](int il, int ir, double* tau, double* heat,
                        double* uf) {
    const double rho_f = 0.5 * (state.rho(il) + state.rho(ir));
    const double th_f = 0.5 * (state.theta(il) + state.theta(ir));
    const TransportCoeffs c = coeffs(rho_f, th_f, state.rho_sp, state.sigma);
    const double dudx = (state.u(ir) - state.u(il)) / state.dx;
    const double dthdx = (state.theta(ir) - state.theta(il)) / state.dx;
    *tau = c.mu * (2.0 * (1.0 + c.a1) - (2.0 / 3.0) * (1.0 + c.a2)) * dudx;
    *heat = (15.0 / 4.0) * c.mu * (1.0 + c.a3) * dthdx;
    *uf = 0.5 * (state.u(il) + state.u(ir));
  };

  Eigen::ArrayXd g_mom = Eigen::ArrayXd::Zero(n + 1);
  Eigen::ArrayXd g_energy = Eigen::ArrayXd::Zero(n + 1);
  for (int k = 1; k < n; ++k) {
    double tau, heat, uf;
    face_terms(k - 1, k, &tau, &heat, &uf);
    g_mom(k) = tau;
    g_energy(k) = tau * uf + heat;
  }
  if (state.bc == Boundary::periodic) {
    double tau, heat, uf;
    face_terms(n - 1, 0, &tau, &heat, &uf);
    g_mom(0) = g_mom(n) = tau;
    g_energy(0) = g_energy(n) = tau * uf + heat;
  }
  // transmissive: zero-gradient ghosts give zero viscous flux at the edges

  for (int i = 0; i < n; ++i) {
    rhs.d_mom(i) += (g_mom(i + 1) - g_mom(i)) / state.dx;
    rhs.d_energy(i) += (g_energy(i + 1) - g_energy(i)) / state.dx;
  }
  return rhs;
}

double max_wave_speed(const HydroState1D& state) {
  double s_max = 0.0;
  for (int i = 0; i < state.n_cells; ++i) {
    const double pf = pressure_factor_eff(state.rho(i), state);
    const double c = std::sqrt(kGamma * state.theta(i)) * pf;
    s_max = std::max(s_max, std::abs(state.u(i)) + c);
  }
  return s_max;
}

double max_diffusivity(const HydroState1D& state) {
  double nu_max = 0.0;
  for (int i = 0; i < state.n_cells; ++i) {
    const TransportCoeffs c =
        coeffs(state.rho(i), state.theta(i), state.rho_sp, state.sigma);
    const double nu_mom =
        c.mu * (2.0 * (1.0 + c.a1) - (2.0 / 3.0) * (1.0 + c.a2)) /
        state.rho(i);
    // energy balance: (3/2) rho dtheta/dt = d/dx (kappa dtheta/dx)
    const double nu_heat =
        (15.0 / 4.0) * c.mu * (1.0 + c.a3) / (1.5 * state.rho(i));
    nu_max = std::max(nu_max, std::max(nu_mom, nu_heat));
  }
  return nu_max;
}

HydroState1D advance(HydroState1D state, double t_end, double cfl,
                     RhsMode mode, bool minmod) {
  validate(state);
  require(cfl > 0.0 && cfl <= 1.0, "cfl must lie in (0, 1]");
  require(std::isfinite(t_end), "t_end must be finite");

  const auto rhs_of = [&](const HydroState1D& s) {
    return mode == RhsMode::euler ? euler_rhs(s, minmod) : ns_rhs(s, minmod);
  };

  while (state.time < t_end) {
    double dt = cfl * state.dx / max_wave_speed(state);
    if (mode == RhsMode::navier_stokes) {
      const double nu = max_diffusivity(state);
      if (nu > 0.0)
        dt = std::min(dt, cfl * state.dx * state.dx / (2.0 * nu));
    }
    dt = std::min(dt, t_end - state.time);

    // SSP-RK2 (Heun): q1 = q + dt L(q); q_next = (q + q1 + dt L(q1)) / 2.
    const Conserved q0 = to_conserved(state);
    const Tendency k1 = rhs_of(state);
    HydroState1D stage = state;
    Conserved q1;
    q1.rho = q0.rho + dt * k1.d_rho;
    q1.mom = q0.mom + dt * k1.d_mom;
    q1.energy = q0.energy + dt * k1.d_energy;
    from_conserved(q1, stage, "advance stage 1");
    stage.time = state.time + dt;

    const Tendency k2 = rhs_of(stage);
    Conserved q2;
    q2.rho = 0.5 * (q0.rho + q1.rho + dt * k2.d_rho);
    q2.mom = 0.5 * (q0.mom + q1.mom + dt * k2.d_mom);
    q2.energy = 0.5 * (q0.energy + q1.energy + dt * k2.d_energy);
    from_conserved(q2, state, "advance stage 2");
    state.time += dt;
  }
  return state;
}

RiemannProfile riemann_exact_dilute(const RiemannStatePrim& left,
                                    const RiemannStatePrim& right, double t,
                                    const std::vector<double>& x) {
  require(left.rho > 0.0 && right.rho > 0.0 && left.theta > 0.0 &&
              right.theta > 0.0,
          "riemann: states must have positive rho and theta");
  require(t >= 0.0, "riemann: t must be nonnegative");
  const double g = kGamma;
  const double pl = left.rho * left.theta, pr = right.rho * right.theta;
  const double cl = std::sqrt(g * pl / left.rho);
  const double cr = std::sqrt(g * pr / right.rho);

  if (2.0 * (cl + cr) / (g - 1.0) <= right.u - left.u)
    throw std::domain_error("riemann: vacuum formation is unsupported");

  // Pressure function f(p) = f_L + f_R + (u_R - u_L); root = star pressure.
  auto branch = [&](double p, double pk, double rhok, double ck) {
    if (p > pk) { // shock
      const double a = 2.0 / ((g + 1.0) * rhok);
      const double b = (g - 1.0) / (g + 1.0) * pk;
      return (p - pk) * std::sqrt(a / (p + b));
    }
    return 2.0 * ck / (g - 1.0) *
           (std::pow(p / pk, (g - 1.0) / (2.0 * g)) - 1.0);
  };
  auto f = [&](double p) {
    return branch(p, pl, left.rho, cl) + branch(p, pr, right.rho, cr) +
           right.u - left.u;
  };

  // Bisection: f is increasing in p; bracket then halve to 1e-10 residual.
  double lo = 1e-14;
  double hi = std::max(pl, pr);
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * hi && std::abs(f(0.5 * (lo + hi))) < 1e-10) break;
  }
  const double ps = 0.5 * (lo + hi);
  const double us = 0.5 * (left.u + right.u) +
                    0.5 * (branch(ps, pr, right.rho, cr) -
                           branch(ps, pl, left.rho, cl));

  // Sample the self-similar solution at s = x/t (Toro's classification).
  auto sample = [&](double s, double& rho, double& u, double& p) {
    if (s <= us) { // left of contact
      if (ps > pl) { // left shock
        const double ratio =
            (ps / pl + (g - 1.0) / (g + 1.0)) /
            ((g - 1.0) / (g + 1.0) * ps / pl + 1.0);
        const double sl = left.u - cl * std::sqrt((g + 1.0) / (2.0 * g) *
                                                  ps / pl +
                                                  (g - 1.0) / (2.0 * g));
        if (s < sl) {
          rho = left.rho; u = left.u; p = pl;
        } else {
          rho = left.rho * ratio; u = us; p = ps;
        }
      } else { // left rarefaction
        const double rho_star = left.rho * std::pow(ps / pl, 1.0 / g);
        const double c_star = std::sqrt(g * ps / rho_star);
        const double head = left.u - cl;
        const double tail = us - c_star;
        if (s < head) {
          rho = left.rho; u = left.u; p = pl;
        } else if (s > tail) {
          rho = rho_star; u = us; p = ps;
        } else { // inside the fan
          const double cf = 2.0 / (g + 1.0) *
                            (cl + (g - 1.0) / 2.0 * (left.u - s));
          u = 2.0 / (g + 1.0) * (cl + (g - 1.0) / 2.0 * left.u + s);
          rho = left.rho * std::pow(cf / cl, 2.0 / (g - 1.0));
          p = pl * std::pow(cf / cl, 2.0 * g / (g - 1.0));
        }
      }
    } else { // right of contact (mirror)
      if (ps > pr) { // right shock
        const double ratio =
            (ps / pr + (g - 1.0) / (g + 1.0)) /
            ((g - 1.0) / (g + 1.0) * ps / pr + 1.0);
        const double sr = right.u + cr * std::sqrt((g + 1.0) / (2.0 * g) *
                                                   ps / pr +
                                                   (g - 1.0) / (2.0 * g));
        if (s > sr) {
          rho = right.rho; u = right.u; p = pr;
        } else {
          rho = right.rho * ratio; u = us; p = ps;
        }
      } else { // right rarefaction
        const double rho_star = right.rho * std::pow(ps / pr, 1.0 / g);
        const double c_star = std::sqrt(g * ps / rho_star);
        const double head = right.u + cr;
        const double tail = us + c_star;
        if (s > head) {
          rho = right.rho; u = right.u; p = pr;
        } else if (s < tail) {
          rho = rho_star; u = us; p = ps;
        } else {
          const double cf = 2.0 / (g + 1.0) *
                            (cr - (g - 1.0) / 2.0 * (right.u - s));
          u = 2.0 / (g + 1.0) * (-cr + (g - 1.0) / 2.0 * right.u + s);
          rho = right.rho * std::pow(cf / cr, 2.0 / (g - 1.0));
          p = pr * std::pow(cf / cr, 2.0 * g / (g - 1.0));
        }
      }
    }
  };

  RiemannProfile prof;
  prof.rho.resize(x.size());
  prof.u.resize(x.size());
  prof.theta.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double rho, u, p;
    if (t == 0.0) {
      if (x[i] < 0.0) {
        rho = left.rho; u = left.u; p = pl;
      } else {
        rho = right.rho; u = right.u; p = pr;
      }
    } else {
      sample(x[i] / t, rho, u, p);
    }
    prof.rho[i] = rho;
    prof.u[i] = u;
    prof.theta[i] = p / rho;
  }
  return prof;
}

} // namespace randgas
