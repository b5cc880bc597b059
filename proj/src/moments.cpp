#include "randgas/moments.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <thread>

namespace randgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Number of independent sub-streams the Monte-Carlo loop is split into.
// Fixed so results are bitwise identical for every thread count: each block
// has its own derived generator and block sums are reduced in index order.
constexpr int kMaxBlocks = 256;
// Unit normals drawn per velocity pair. One pair's field jets are reused
// across all its normals, so extra normals are nearly free variance-wise;
// n_samples counts pairs, not (pair, normal) combinations.
constexpr int kNormalsPerPair = 4;
// Group members averaged per (pair, normal): eight velocity-pair images
// (independent sign flips of each centered velocity, and the swap) times the
// normal flip. Independent flips cancel every integrand term that is odd in
// either centered velocity alone, not only terms odd in the pair jointly.
constexpr double kGroupSize = 16.0;
// Importance tilt on the velocity magnitudes: centered velocities are drawn
// with standard deviation kRadialTilt * sqrt(theta) and reweighted by the
// exact Gaussian density ratio. The integrands are high-degree polynomials,
// so widening the proposal tames their tail variance; the ratio depends only
// on |cv| and |cw|, which every group image shares, so the symmetry
// cancellations are untouched. 1 disables the tilt.
constexpr double kRadialTilt = 1.35;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Per-velocity jet data entering the integrands, evaluated at v = u + a.
struct JetCache {
  double W = 0.0;           // f1/f0 Hermite weight
  Vec3 gamma = Vec3::Zero(); // grad_x ln f0
  Vec3 gradW = Vec3::Zero(); // grad_x W
  Eigen::Matrix3d dgamma = Eigen::Matrix3d::Zero(); // d_i d_j ln f0
};

double hermite_weight(const Vec3& a, double r2, double theta,
                      const Eigen::Matrix3d& S, const Vec3& q) {
  const double aq = a.dot(q);
  const double phi = -aq + 0.5 * a.dot(S * a) + r2 * aq / (5.0 * theta);
  return phi / (theta * theta);
}

JetCache make_jet(const Vec3& a, const HydroPoint& p, bool with_second_order) {
  JetCache jet;
  const double th = p.theta;
  const double r2 = a.squaredNorm();
  const Vec3 Ga = p.grad_u * a; // (Ga)_i = a_k d_i u_k

  jet.gamma = p.grad_rho / p.rho + Ga / th +
              (r2 / (2.0 * th * th) - 1.5 / th) * p.grad_theta;
  jet.W = hermite_weight(a, r2, th, p.S, p.q);

  if (!with_second_order) return jet;

  const double aq = a.dot(p.q);
  const Vec3 Gq = p.grad_u * p.q;      // (Gq)_i = q_k d_i u_k
  const Vec3 gq_a = p.grad_q * a;      // (gq_a)_i = a_k d_i q_k
  Vec3 dphi = Gq - gq_a;
  dphi += 0.5 * Vec3(a.dot(p.grad_S[0] * a), a.dot(p.grad_S[1] * a),
                     a.dot(p.grad_S[2] * a));
  dphi -= p.grad_u * (p.S * a);
  dphi -= (r2 * aq / (5.0 * th * th)) * p.grad_theta;
  dphi += (-2.0 * aq / (5.0 * th)) * Ga;
  dphi += (r2 / (5.0 * th)) * (gq_a - Gq);
  const double phi = jet.W * th * th;
  jet.gradW = -2.0 * phi / (th * th * th) * p.grad_theta +
              dphi / (th * th);

  Eigen::Matrix3d d = p.hess_rho / p.rho -
                      (p.grad_rho * p.grad_rho.transpose()) / (p.rho * p.rho);
  d += -1.5 / th * p.hess_theta +
       1.5 / (th * th) * (p.grad_theta * p.grad_theta.transpose());
  d += (a.x() * p.hess_u[0] + a.y() * p.hess_u[1] + a.z() * p.hess_u[2]) / th;
  d -= (p.grad_u * p.grad_u.transpose()) / th;
  d -= (Ga * p.grad_theta.transpose()) / (th * th);
  d -= (p.grad_theta * Ga.transpose()) / (th * th);
  d += (r2 / (2.0 * th * th)) * p.hess_theta;
  d -= (r2 / (th * th * th)) * (p.grad_theta * p.grad_theta.transpose());
  jet.dgamma = d;
  return jet;
}

using Batch = Eigen::Matrix<double, 36, 1>;

// Flattened layout of the batched integrand / closed-form vector.
struct Layout {
  int offset;
  int size;
};
Layout layout_of(MomentId id) {
  switch (id) {
    case MomentId::MI1: return {0, 3};
    case MomentId::MI2: return {3, 1};
    case MomentId::MI3: return {4, 9};
    case MomentId::MI4: return {13, 9};
    case MomentId::MI5: return {22, 3};
    case MomentId::MI6: return {25, 3};
    case MomentId::MI7: return {28, 6};
    case MomentId::MI8: return {34, 2};
  }
  throw std::logic_error("unknown moment id");
}

void flatten9(const Eigen::Matrix3d& m, Eigen::Ref<Eigen::VectorXd> out) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(3 * i + j) = m(i, j);
}

// K1 kernel: (n.g)^2 [ (n.g) n n^T + n cv^T + cv n^T ], contracted with a
// scalar weight; accumulated flat (row-major) into `out`.
void add_k1(double weight, double ng, const Vec3& n, const Vec3& cv,
            double* out) {
  const double s = weight * ng * ng;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[3 * i + j] +=
          s * (ng * n(i) * n(j) + n(i) * cv(j) + cv(i) * n(j));
}

// K2 kernel: (n.g)^2 [ (n.g)^2 n + (n.g)((I + 2 n n^T) cv)
//                      + (|cv|^2 I + 2 cv cv^T) n ].
Vec3 k2(double weight, double ng, const Vec3& n, const Vec3& cv) {
  const double s = weight * ng * ng;
  const double ncv = n.dot(cv);
  const double cv2 = cv.squaredNorm();
  return s * (ng * ng * n + ng * (cv + 2.0 * ncv * n) +
              (cv2 * n + 2.0 * ncv * cv));
}

// Averages the full integrand batch over the sixteen-member symmetry group
// for one (pair, normal) draw and adds it (un-normalized) into `acc`.
// c[0..3] = {+cv, -cv, +cw, -cw}; jets are the matching caches. t0 and t1 are
// n.(cw - cv) and n.(cw + cv): each image's g = w - v is one of the four
// vectors +-(cw - cv), +-(cw + cv), so both dot products are shared.
void accumulate_group(const std::array<Vec3, 4>& c,
                      const std::array<JetCache, 4>& jets, const Vec3& u2,
                      const Vec3& n_base, double t0, double t1, Batch& acc) {
  // Image table: (first slot, second slot, which t, sign of t).
  struct Image {
    int first;
    int second;
    int which;
    double gsign;
  };
  static constexpr Image kImages[8] = {
      {0, 2, 0, 1.0},  // ( cv,  cw): g = cw - cv
      {2, 0, 0, -1.0}, // ( cw,  cv)
      {1, 3, 0, -1.0}, // (-cv, -cw)
      {3, 1, 0, 1.0},  // (-cw, -cv)
      {1, 2, 1, 1.0},  // (-cv,  cw): g = cw + cv
      {2, 1, 1, -1.0}, // ( cw, -cv)
      {0, 3, 1, -1.0}, // ( cv, -cw)
      {3, 0, 1, 1.0},  // (-cw,  cv)
  };
  const double t[2] = {t0, t1};

  for (const Image& im : kImages) {
    const double ts = t[im.which] * im.gsign;
    if (ts == 0.0) continue;
    // Pick the normal sign that passes the gate n.g > 0 for this image.
    const double nsign = (ts > 0.0) ? 1.0 : -1.0;
    const Vec3 n = nsign * n_base;
    const double ng = std::abs(ts);
    const Vec3& cv = c[im.first];
    const JetCache& jw = jets[im.second];
    const JetCache& jv = jets[im.first];
    const double nw_pv = n.dot(u2 + cv + c[im.second]);
    const double ngam = n.dot(jw.gamma);
    const double wsum = jv.W + jw.W;
    const double ng2 = ng * ng;

    acc.segment<3>(0) += (ng2 * ngam) * n;                       // MI1
    acc(3) += nw_pv * ng2 * ngam;                                // MI2
    add_k1(wsum, ng, n, cv, acc.data() + 4);                     // MI3
    add_k1(ngam, ng, n, cv, acc.data() + 13);                    // MI4
    acc.segment<3>(22) += k2(wsum, ng, n, cv);                   // MI5
    acc.segment<3>(25) += k2(ngam, ng, n, cv);                   // MI6
    const double brk_a = wsum * ngam + n.dot(jw.gradW);
    const double brk_b = ngam * ngam + n.dot(jw.dgamma * n);
    acc.segment<3>(28) += (ng2 * brk_a) * n;                     // MI7a
    acc.segment<3>(31) += (ng2 * brk_b) * n;                     // MI7b
    acc(34) += nw_pv * ng2 * brk_a;                              // MI8a
    acc(35) += nw_pv * ng2 * brk_b;                              // MI8b
  }
}

struct BlockStats {
  Batch sum = Batch::Zero();
  Batch sumsq = Batch::Zero();
  std::int64_t pairs = 0;
};

BlockStats run_block(const HydroPoint& p, std::int64_t n_pairs,
                     std::uint64_t stream_seed) {
  BlockStats stats;
  stats.pairs = n_pairs;
  Rng rng(stream_seed);
  const double sd = kRadialTilt * std::sqrt(p.theta);
  // log of the per-velocity density ratio: 3 log(tilt) - coef * |c|^2.
  const double lw0 = 3.0 * std::log(kRadialTilt);
  const double coef =
      (1.0 - 1.0 / (kRadialTilt * kRadialTilt)) / (2.0 * p.theta);
  const Vec3 u2 = 2.0 * p.u;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Vec3 cv(sd * rng.normal(), sd * rng.normal(), sd * rng.normal());
    const Vec3 cw(sd * rng.normal(), sd * rng.normal(), sd * rng.normal());
    const double weight =
        std::exp(2.0 * lw0 - coef * (cv.squaredNorm() + cw.squaredNorm()));
    const std::array<Vec3, 4> c = {cv, -cv, cw, -cw};
    std::array<JetCache, 4> jets;
    for (int i = 0; i < 4; ++i) jets[i] = make_jet(c[i], p, true);
    const Vec3 g0 = cw - cv;
    const Vec3 g1 = cw + cv;
    Batch acc = Batch::Zero();
    for (int m = 0; m < kNormalsPerPair; ++m) {
      const Vec3 n = rng.unit_vector();
      accumulate_group(c, jets, u2, n, n.dot(g0), n.dot(g1), acc);
    }
    acc *= weight / (kGroupSize * kNormalsPerPair);
    stats.sum += acc;
    stats.sumsq += acc.cwiseProduct(acc);
  }
  return stats;
}

struct BatchEstimate {
  Batch mean = Batch::Zero();
  Batch stderr_value = Batch::Zero();
  std::int64_t n_pairs = 0;
};

BatchEstimate run_batched(const HydroPoint& p, std::int64_t n_samples,
                          Rng& rng, int n_threads) {
  require(n_samples >= 1, "n_samples too small");
  const std::int64_t n_pairs = n_samples;
  const int n_blocks =
      static_cast<int>(std::min<std::int64_t>(kMaxBlocks, n_pairs));
  const std::uint64_t run_seed = rng();

  std::vector<BlockStats> blocks(static_cast<std::size_t>(n_blocks));
  const std::int64_t base = n_pairs / n_blocks;
  const std::int64_t rem = n_pairs % n_blocks;
  auto block_job = [&](int b) {
    const std::int64_t pairs = base + (b < rem ? 1 : 0);
    blocks[static_cast<std::size_t>(b)] =
        run_block(p, pairs, derive_stream(run_seed, static_cast<std::uint64_t>(b)));
  };

  const int workers = std::max(1, std::min(n_threads, n_blocks));
  if (workers == 1) {
    for (int b = 0; b < n_blocks; ++b) block_job(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
          block_job(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  Batch sum = Batch::Zero();
  Batch sumsq = Batch::Zero();
  for (const auto& blk : blocks) { // fixed order: deterministic reduction
    sum += blk.sum;
    sumsq += blk.sumsq;
  }
  BatchEstimate est;
  est.n_pairs = n_pairs;
  const double np = static_cast<double>(n_pairs);
  const double pref = 4.0 * kPi * p.rho * p.rho;
  est.mean = pref / np * sum;
  if (n_pairs > 1) {
    const Batch var =
        (sumsq - sum.cwiseProduct(sum) / np).cwiseMax(0.0) / (np - 1.0);
    est.stderr_value = pref * (var / np).cwiseSqrt();
  }
  return est;
}

} // namespace

void validate(const HydroPoint& point) {
  require(std::isfinite(point.rho) && point.rho > 0.0, "rho must be positive");
  require(std::isfinite(point.theta) && point.theta > 0.0,
          "theta must be positive");
  const double scale = 1.0 + point.S.cwiseAbs().maxCoeff();
  require((point.S - point.S.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * scale,
          "S must be symmetric");
  require(std::abs(point.S.trace()) <= 1e-12 * scale, "S must be traceless");
  bool finite = point.u.allFinite() && point.grad_rho.allFinite() &&
                point.grad_u.allFinite() && point.grad_theta.allFinite() &&
                point.S.allFinite() && point.q.allFinite() &&
                point.grad_q.allFinite() && point.hess_rho.allFinite() &&
                point.hess_theta.allFinite();
  for (const auto& m : point.grad_S) finite = finite && m.allFinite();
  for (const auto& m : point.hess_u) finite = finite && m.allFinite();
  require(finite, "hydro point has non-finite entries");
}

std::string to_string(MomentId id) {
  switch (id) {
    case MomentId::MI1: return "MI1";
    case MomentId::MI2: return "MI2";
    case MomentId::MI3: return "MI3";
    case MomentId::MI4: return "MI4";
    case MomentId::MI5: return "MI5";
    case MomentId::MI6: return "MI6";
    case MomentId::MI7: return "MI7";
    case MomentId::MI8: return "MI8";
  }
  return "MI?";
}

std::vector<MomentId> all_moment_ids() {
  return {MomentId::MI1, MomentId::MI2, MomentId::MI3, MomentId::MI4,
          MomentId::MI5, MomentId::MI6, MomentId::MI7, MomentId::MI8};
}

Vec3 sample_f0(const HydroPoint& point, Rng& rng) {
  const double sd = std::sqrt(point.theta);
  return point.u + Vec3(sd * rng.normal(), sd * rng.normal(), sd * rng.normal());
}

double f1_weight(const Vec3& v, const HydroPoint& point) {
  const Vec3 a = v - point.u;
  return hermite_weight(a, a.squaredNorm(), point.theta, point.S, point.q);
}

Eigen::VectorXd closed_form(MomentId id, const HydroPoint& p) {
  const double rho = p.rho, th = p.theta;
  const double sp = std::sqrt(kPi);
  const double sqt = std::sqrt(th);
  const Vec3 grad_r2t = 2.0 * rho * th * p.grad_rho + rho * rho * p.grad_theta;
  const Eigen::Matrix3d T = p.grad_u + p.grad_u.transpose() +
                            p.grad_u.trace() * Eigen::Matrix3d::Identity();
  // div(rho^2 S)_j and d_i T_ij, used by the flux-divergence identities.
  Vec3 divS;
  for (int j = 0; j < 3; ++j) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += p.grad_S[i](i, j);
    divS(j) = s;
  }
  Vec3 dT;
  for (int j = 0; j < 3; ++j) {
    double s = p.hess_u[j].trace();
    for (int k = 0; k < 3; ++k) s += 2.0 * p.hess_u[k](j, k);
    dT(j) = s;
  }
  const Vec3 d_r2sqt =
      2.0 * rho * sqt * p.grad_rho + rho * rho / (2.0 * sqt) * p.grad_theta;

  Eigen::VectorXd out;
  switch (id) {
    case MomentId::MI1:
      out = (2.0 * kPi / 3.0) * grad_r2t;
      break;
    case MomentId::MI2: {
      out.resize(1);
      out(0) = (4.0 * kPi / 3.0) *
               (2.0 * rho * th * p.u.dot(p.grad_rho) +
                rho * rho * p.u.dot(p.grad_theta) +
                rho * rho * th * p.grad_u.trace());
      break;
    }
    case MomentId::MI3: {
      out.resize(9);
      flatten9(-(16.0 * sp / 5.0) * rho * rho * sqt * p.S, out);
      break;
    }
    case MomentId::MI4: {
      out.resize(9);
      flatten9((4.0 * kPi / 15.0) * rho * rho * th * T, out);
      break;
    }
    case MomentId::MI5:
      out = -(64.0 * sp / 15.0) * rho * rho * sqt * p.q;
      break;
    case MomentId::MI6:
      out = (10.0 * kPi / 3.0) * th * grad_r2t +
            2.0 * kPi * rho * rho * th * p.grad_theta;
      break;
    case MomentId::MI7: {
      out.resize(6);
      out.segment<3>(0) =
          (4.0 * kPi / 15.0) *
          (2.0 * rho * (p.S * p.grad_rho) + rho * rho * divS);
      out.segment<3>(3) =
          (8.0 * sp / 15.0) * (T * d_r2sqt + rho * rho * sqt * dT);
      break;
    }
    case MomentId::MI8: {
      out.resize(2);
      const Vec3 vec_a = p.S * p.u + 1.5 * p.q;
      const double div_a =
          2.0 * rho * p.grad_rho.dot(vec_a) +
          rho * rho *
              (divS.dot(p.u) + p.S.cwiseProduct(p.grad_u).sum() +
               1.5 * p.grad_q.trace());
      const Vec3 vec_b = T * p.u + 2.5 * p.grad_theta;
      const double div_b =
          d_r2sqt.dot(vec_b) +
          rho * rho * sqt *
              (dT.dot(p.u) + T.cwiseProduct(p.grad_u).sum() +
               2.5 * p.hess_theta.trace());
      out(0) = (8.0 * kPi / 15.0) * div_a;
      out(1) = (16.0 * sp / 15.0) * div_b;
      break;
    }
  }
  return out;
}

std::vector<MomentReport> verify_identities(const std::vector<MomentId>& ids,
                                            const HydroPoint& point,
                                            std::int64_t n_samples, Rng& rng,
                                            int n_threads) {
  validate(point);
  const BatchEstimate est = run_batched(point, n_samples, rng, n_threads);
  const double floor =
      1e-8 * point.rho * point.rho * std::pow(point.theta, 1.5);
  std::vector<MomentReport> reports;
  reports.reserve(ids.size());
  for (MomentId id : ids) {
    const Layout lay = layout_of(id);
    MomentReport rep;
    rep.identity_id = id;
    rep.mc_value = est.mean.segment(lay.offset, lay.size);
    rep.closed_form = closed_form(id, point);
    rep.stderr_value = est.stderr_value.segment(lay.offset, lay.size);
    rep.n_samples = est.n_pairs;
    rep.rel_err = (rep.mc_value - rep.closed_form).norm() /
                  std::max(rep.closed_form.norm(), floor);
    reports.push_back(std::move(rep));
  }
  return reports;
}

MomentReport verify_identity(MomentId id, const HydroPoint& point,
                             std::int64_t n_samples, Rng& rng, int n_threads) {
  return verify_identities({id}, point, n_samples, rng, n_threads)[0];
}

NewtonFourierResult verify_newton_fourier(const HydroPoint& point,
                                          double rho_sp, double sigma,
                                          std::int64_t n_samples, Rng& rng,
                                          int n_threads) {
  validate(point);
  require(std::isfinite(rho_sp) && rho_sp > 0.0, "rho_sp must be positive");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
  // Probe fields for the linear closure solve; the point's own S and q do
  // not enter (the relaxation operator is probed, then inverted).
  Eigen::Matrix3d probe_S;
  probe_S << 1.0, 0.4, 0.0, 0.4, -0.5, 0.2, 0.0, 0.2, -0.5;
  const Vec3 probe_q(0.7, -0.3, 0.5);

  HydroPoint p_s = point;
  p_s.S = probe_S;
  p_s.q = Vec3::Zero();
  HydroPoint p_q = point;
  p_q.S = Eigen::Matrix3d::Zero();
  p_q.q = probe_q;

  // Shared-stream batched estimates: relaxation of each probe (MI3/MI5
  // kernels) and the gradient integrals (MI4/MI6 kernels, probe-free).
  Rng rng_s(rng());
  Rng rng_q = rng_s; // identical stream: common random numbers for the pair
  const auto est_s = verify_identities(
      {MomentId::MI3, MomentId::MI4, MomentId::MI6}, p_s, n_samples, rng_s,
      n_threads);
  const auto est_q =
      verify_identities({MomentId::MI5}, p_q, n_samples, rng_q, n_threads);

  Eigen::Matrix3d acc_s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc_s(i, j) = est_s[0].mc_value(3 * i + j);
  Eigen::Matrix3d acc_gs;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc_gs(i, j) = est_s[1].mc_value(3 * i + j);
  const Vec3 acc_gq = est_s[2].mc_value;
  const Vec3 acc_q = est_q[0].mc_value;

  const double c_s =
      acc_s.cwiseProduct(probe_S).sum() / probe_S.cwiseProduct(probe_S).sum();
  const double c_q = acc_q.dot(probe_q) / probe_q.squaredNorm();

  const double rho = point.rho, th = point.theta;
  const double sps = rho_sp * sigma; // mean-free-path scale rho_sp * sigma
  const Eigen::Matrix3d D =
      point.grad_u + point.grad_u.transpose() -
      (2.0 / 3.0) * point.grad_u.trace() * Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d rhs1 =
      rho * th * D - (8.0 / (3.0 * rho_sp)) * rho * rho * th *
                         point.grad_u.trace() * Eigen::Matrix3d::Identity();
  const Vec3 grad_r2t =
      2.0 * rho * th * point.grad_rho + rho * rho * point.grad_theta;
  const Vec3 rhs2 =
      5.0 * rho * th * point.grad_theta - (20.0 / rho_sp) * th * grad_r2t;

  const Eigen::Matrix3d s_sol =
      (rhs1 + (6.0 / (kPi * sps)) * acc_gs) * (kPi * sps) / (6.0 * c_s);
  const Vec3 q_sol =
      (rhs2 + (6.0 / (kPi * sps)) * acc_gq) * (kPi * sps) / (6.0 * c_q);

  const double sp = std::sqrt(kPi);
  const Eigen::Matrix3d s_dilute =
      -(5.0 * sp * sps * std::sqrt(th) / (96.0 * rho)) * D;
  const Vec3 q_dilute =
      -(25.0 * sp * sps * std::sqrt(th) / (128.0 * rho)) * point.grad_theta;

  NewtonFourierResult result;
  result.S_ratio = s_sol.cwiseProduct(s_dilute).sum() /
                   s_dilute.cwiseProduct(s_dilute).sum();
  result.q_ratio = q_sol.dot(q_dilute) / q_dilute.squaredNorm();
  return result;
}

InvariantCheck collision_invariant_check(const HydroPoint& point,
                                         std::int64_t n_samples, Rng& rng) {
  validate(point);
  require(n_samples > 1, "n_samples too small");
  std::array<double, 3> sum{}, sumsq{};
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Vec3 v = sample_f0(point, rng);
    const Vec3 w = sample_f0(point, rng);
    const Vec3 n = rng.unit_vector();
    const double ng = n.dot(w - v);
    if (ng <= 0.0) {
      // gate closed: contributes zero but still counts as a sample
      continue;
    }
    const Vec3 vp = v + ng * n;
    const Vec3 wp = w - ng * n;
    // Symmetric two-particle weight h = f0(v) f1(w) + f1(v) f0(w), divided by
    // the f0 x f0 sampling density. The Gaussian product is exchange-invariant
    // (pair momentum and energy are conserved), so only the correction factors
    // remain; they are not individually conserved, which keeps the integrand
    // nonzero sample by sample.
    auto h = [&](const Vec3& a, const Vec3& b) {
      return f1_weight(a, point) + f1_weight(b, point);
    };
    const double dh = (h(vp, wp) - h(v, w)) * ng;
    const std::array<double, 3> psi = {1.0, v.x(), v.squaredNorm()};
    for (int i = 0; i < 3; ++i) {
      const double y = psi[i] * dh;
      sum[i] += y;
      sumsq[i] += y * y;
    }
  }
  InvariantCheck check;
  const double np = static_cast<double>(n_samples);
  const double pref = 4.0 * kPi * point.rho * point.rho;
  for (int i = 0; i < 3; ++i) {
    const double mean = sum[i] / np;
    const double var =
        std::max(0.0, (sumsq[i] - np * mean * mean) / (np - 1.0));
    check.estimate[i] = pref * mean;
    check.stderr_value[i] = pref * std::sqrt(var / np);
  }
  return check;
}

HydroPoint random_hydro_point(Rng& rng) {
  auto u3 = [&](double amp) {
    return Vec3(rng.uniform(-amp, amp), rng.uniform(-amp, amp),
                rng.uniform(-amp, amp));
  };
  auto m3 = [&](double amp) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(-amp, amp);
    return m;
  };
  auto sym = [](const Eigen::Matrix3d& m) {
    return Eigen::Matrix3d(0.5 * (m + m.transpose()));
  };

  HydroPoint p;
  p.rho = rng.uniform(0.6, 1.4);
  p.theta = rng.uniform(0.7, 1.3);
  p.u = u3(0.6);
  p.grad_rho = u3(1.2);
  p.grad_u = m3(1.2);
  p.grad_theta = u3(1.2);
  Eigen::Matrix3d s = sym(m3(0.8));
  s -= (s.trace() / 3.0) * Eigen::Matrix3d::Identity();
  p.S = s;
  p.q = u3(0.8);
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix3d g = sym(m3(2.5));
    g -= (g.trace() / 3.0) * Eigen::Matrix3d::Identity();
    p.grad_S[i] = g; // keeps d_i S symmetric and traceless, like S itself
  }
  p.grad_q = m3(2.5);
  p.hess_rho = sym(m3(1.5));
  p.hess_theta = sym(m3(1.5));
  for (int k = 0; k < 3; ++k) p.hess_u[k] = sym(m3(1.5));
  return p;
}

std::vector<HydroPoint> make_verification_points(std::uint64_t seed,
                                                 int count) {
  require(count > 0, "count must be positive");
  // Keep only draws whose smallest closed-form norm across the identity
  // suite clears a fixed threshold, so every relative error compares against
  // an O(1) reference. Gradients are free test parameters; skipping poorly
  // scaled draws selects test points, it does not bias any single check.
  constexpr double kMinNorm = 1.0;
  constexpr int kMaxAttempts = 100000;
  Rng rng(derive_stream(seed, 0x706f696e74ull)); // "point"
  std::vector<HydroPoint> points;
  for (int attempt = 0; attempt < kMaxAttempts &&
                        points.size() < static_cast<std::size_t>(count);
       ++attempt) {
    HydroPoint p = random_hydro_point(rng);
    double min_norm = std::numeric_limits<double>::infinity();
    for (MomentId id : all_moment_ids())
      min_norm = std::min(min_norm, closed_form(id, p).norm());
    if (min_norm >= kMinNorm) points.push_back(std::move(p));
  }
  require(points.size() == static_cast<std::size_t>(count),
          "failed to draw enough well-conditioned verification points");
  return points;
}

} // namespace randgas
