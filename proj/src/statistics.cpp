#include "randgas/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace randgas {

Histogram1D Histogram1D::uniform(double lo, double hi, int n_bins) {
  if (!(hi > lo) || n_bins < 1) {
    throw std::invalid_argument("Histogram1D: need hi > lo and n_bins >= 1");
  }
  Histogram1D h;
  h.edges.resize(n_bins + 1);
  for (int k = 0; k <= n_bins; ++k) {
    h.edges[k] = lo + (hi - lo) * k / n_bins;
  }
  h.counts.assign(n_bins, 0.0);
  return h;
}

void Histogram1D::add(double x, double w) {
  if (x < edges.front() || x >= edges.back()) return;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
  counts[bin] += w;
  weight_total += w;
}

void Histogram1D::merge(const Histogram1D& other) {
  if (other.edges != edges) {
    throw std::invalid_argument("Histogram1D::merge: incompatible binnings");
  }
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
  weight_total += other.weight_total;
}

double temperature(const ParticleSet& state) {
  if (state.K() < 2) throw std::invalid_argument("temperature: K must be >= 2");
  return 2.0 * state.kinetic_energy() / (3.0 * state.K());
}

double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max(d, std::abs(f - static_cast<double>(k) / n));
    d = std::max(d, std::abs(static_cast<double>(k + 1) / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
    d = std::max(d, std::abs(static_cast<double>(ia) / a.size() -
                             static_cast<double>(ib) / b.size()));
  }
  return d;
}

namespace {

double pooled_temperature(const std::vector<ParticleSet>& states) {
  double sq = 0.0;
  std::size_t n = 0;
  for (const ParticleSet& s : states) {
    for (const Vec3& v : s.velocities) sq += v.squaredNorm();
    n += s.velocities.size();
  }
  if (n == 0) throw std::invalid_argument("empty ensemble");
  return sq / (3.0 * static_cast<double>(n));
}

std::vector<double> pooled_components(const std::vector<ParticleSet>& states) {
  std::vector<double> comps;
  std::size_t total = 0;
  for (const ParticleSet& s : states) total += s.velocities.size();
  comps.reserve(3 * total);
  for (const ParticleSet& s : states) {
    for (const Vec3& v : s.velocities) {
      comps.push_back(v.x());
      comps.push_back(v.y());
      comps.push_back(v.z());
    }
  }
  return comps;
}

} // namespace

double maxwellian_distance(const std::vector<ParticleSet>& states) {
  if (states.empty()) {
    throw std::invalid_argument("maxwellian_distance: empty ensemble");
  }
  const double theta = pooled_temperature(states);
  std::vector<double> comps = pooled_components(states);
  return ks_statistic(std::move(comps), [theta](double x) {
    return normal_cdf(x, 0.0, theta);
  });
}

PairCorrelation pair_correlation(const std::vector<ParticleSet>& states,
                                 const ContactParams& p, double r_max,
                                 int n_bins) {
  (void)p;
  if (states.empty()) {
    throw std::invalid_argument("pair_correlation: empty ensemble");
  }
  const Box3& box = states.front().box;
  if (!(r_max > 0.0) || r_max > 0.5 * box.side_lengths.minCoeff()) {
    throw std::invalid_argument(
        "pair_correlation: need 0 < r_max <= min box side / 2 for exact shell "
        "normalization");
  }
  Histogram1D h = Histogram1D::uniform(0.0, r_max, n_bins);
  std::size_t n_pairs_total = 0;
  for (const ParticleSet& s : states) {
    const int K = s.K();
    n_pairs_total += static_cast<std::size_t>(K) * (K - 1) / 2;
    for (int i = 0; i < K; ++i) {
      for (int j = i + 1; j < K; ++j) {
        h.add(min_image(s.positions[i], s.positions[j], s.box).norm());
      }
    }
  }
  PairCorrelation g;
  g.r_edges = h.edges;
  g.g_values.resize(n_bins);
  const double volume = box.volume();
  for (int k = 0; k < n_bins; ++k) {
    const double r0 = h.edges[k];
    const double r1 = h.edges[k + 1];
    const double shell = 4.0 * M_PI / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
    const double expected =
        static_cast<double>(n_pairs_total) * shell / volume;
    g.g_values[k] = h.counts[k] > 0.0
                        ? h.counts[k] / expected
                        : std::numeric_limits<double>::quiet_NaN();
  }
  return g;
}

double overlap_ratio(const std::vector<ParticleSet>& states,
                     const ContactParams& p, double* stderr_out) {
  if (states.empty()) {
    throw std::invalid_argument("overlap_ratio: empty ensemble");
  }
  const double in_lo = 0.5 * p.sigma;
  const double in_hi = p.sigma * (1.0 - p.alpha);
  const double out_lo = p.sigma * (1.0 + p.alpha);
  const double out_hi = 1.5 * p.sigma;
  double n_in = 0.0, n_out = 0.0;
  for (const ParticleSet& s : states) {
    const int K = s.K();
    for (int i = 0; i < K; ++i) {
      for (int j = i + 1; j < K; ++j) {
        const double r =
            min_image(s.positions[i], s.positions[j], s.box).norm();
        if (r >= in_lo && r < in_hi) {
          n_in += 1.0;
        } else if (r >= out_lo && r < out_hi) {
          n_out += 1.0;
        }
      }
    }
  }
  const double vol_in =
      4.0 * M_PI / 3.0 * (in_hi * in_hi * in_hi - in_lo * in_lo * in_lo);
  const double vol_out =
      4.0 * M_PI / 3.0 * (out_hi * out_hi * out_hi - out_lo * out_lo * out_lo);
  if (n_in == 0.0 || n_out == 0.0) {
    if (stderr_out) *stderr_out = std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double ratio = (n_in / vol_in) / (n_out / vol_out);
  if (stderr_out) {
    // Poisson counts in both bands, independent to leading order.
    *stderr_out = ratio * std::sqrt(1.0 / n_in + 1.0 / n_out);
  }
  return ratio;
}

namespace {

// Shared binning rule for the velocity KL proxy: cover +/- 6 sqrt(theta)
// with open-ended first and last bins, so all samples are assigned and both
// distributions sum to 1 over the same cells.
struct KlBins {
  std::vector<double> inner_edges; // n_bins-1 finite edges
  Eigen::VectorXd q;               // Maxwellian cell masses

  KlBins(double theta, int n_bins) {
    const double half_range = 6.0 * std::sqrt(theta);
    inner_edges.resize(n_bins - 1);
    for (int k = 1; k < n_bins; ++k) {
      inner_edges[k - 1] = -half_range + 2.0 * half_range * k / n_bins;
    }
    q.resize(n_bins);
    double prev = 0.0;
    for (int k = 0; k < n_bins - 1; ++k) {
      const double c = normal_cdf(inner_edges[k], 0.0, theta);
      q[k] = c - prev;
      prev = c;
    }
    q[n_bins - 1] = 1.0 - prev;
  }

  [[nodiscard]] int bin_of(double x) const {
    const auto it =
        std::upper_bound(inner_edges.begin(), inner_edges.end(), x);
    return static_cast<int>(it - inner_edges.begin());
  }
};

double kl_from_counts(const Eigen::VectorXd& counts, const KlBins& bins) {
  const int n_bins = static_cast<int>(counts.size());
  const double total = counts.sum() + 0.5 * n_bins;
  double kl = 0.0;
  for (int k = 0; k < n_bins; ++k) {
    const double pk = (counts[k] + 0.5) / total;
    kl += pk * std::log(pk / bins.q[k]);
  }
  return kl;
}

} // namespace

double velocity_kl(const std::vector<ParticleSet>& states, int n_bins) {
  if (states.empty()) throw std::invalid_argument("velocity_kl: empty ensemble");
  const double theta = pooled_temperature(states);
  const KlBins bins(theta, n_bins);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_bins);
  for (const ParticleSet& s : states) {
    for (const Vec3& v : s.velocities) {
      for (int d = 0; d < 3; ++d) counts[bins.bin_of(v[d])] += 1.0;
    }
  }
  return kl_from_counts(counts, bins);
}

double velocity_kl_bias_floor(std::size_t n_pooled_samples, double theta,
                              Rng& rng, int n_bins, int n_control) {
  const KlBins bins(theta, n_bins);
  const double sd = std::sqrt(theta);
  double acc = 0.0;
  for (int c = 0; c < n_control; ++c) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_bins);
    for (std::size_t k = 0; k < n_pooled_samples; ++k) {
      counts[bins.bin_of(sd * rng.normal())] += 1.0;
    }
    acc += kl_from_counts(counts, bins);
  }
  return acc / n_control;
}

namespace {

// P(a, b) = sum a*log(a/b) with 0*log0 = 0; throws when b = 0 meets a > 0.
double weighted_kl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      if (!(b(i, j) > 0.0)) {
        throw std::domain_error(
            "kl_marginal_identity_check: zero cell under positive mass");
      }
      out += a(i, j) * std::log(a(i, j) / b(i, j));
    }
  }
  return out;
}

double vector_kl(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (!(b[i] > 0.0)) {
      throw std::domain_error(
          "kl_marginal_identity_check: zero marginal under positive mass");
    }
    out += a[i] * std::log(a[i] / b[i]);
  }
  return out;
}

} // namespace

KlIdentity kl_marginal_identity_check(const Eigen::MatrixXd& F,
                                      const Eigen::MatrixXd& psi,
                                      const Eigen::VectorXd& p1,
                                      const Eigen::VectorXd& p2) {
  if (psi.rows() != F.rows() || psi.cols() != F.cols() ||
      p1.size() != F.rows() || p2.size() != F.cols()) {
    throw std::invalid_argument("kl_marginal_identity_check: shape mismatch");
  }
  if ((psi.array() <= 0.0).any()) {
    throw std::invalid_argument("kl_marginal_identity_check: psi must be > 0");
  }
  const Eigen::VectorXd f1 = F.rowwise().sum();
  const Eigen::VectorXd f2 = F.colwise().sum();
  const Eigen::MatrixXd ref_p =
      psi.array() * (p1 * p2.transpose()).array();
  const Eigen::MatrixXd ref_f =
      psi.array() * (f1 * f2.transpose()).array();
  KlIdentity out;
  out.lhs = weighted_kl(F, ref_p);
  out.rhs = weighted_kl(F, ref_f) + vector_kl(f1, p1) + vector_kl(f2, p2);
  out.abs_err = std::abs(out.lhs - out.rhs);
  return out;
}

NobleGasTable load_noble_gas_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_noble_gas_table: cannot open " + path);
  }
  NobleGasTable table;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    NobleGasRow r;
    if (row >> r.element >> r.mass_amu >> r.diameter_pm) {
      if (!(r.mass_amu > 0.0) || !(r.diameter_pm > 0.0)) {
        throw std::runtime_error(
            "load_noble_gas_table: nonpositive mass or diameter for " +
            r.element);
      }
      table.rows.push_back(std::move(r));
    }
  }
  return table;
}

LinearFit noble_gas_fit(const NobleGasTable& table) {
  const std::size_t n = table.rows.size();
  if (n < 3) throw std::invalid_argument("noble_gas_fit: need >= 3 rows");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t k = 0; k < n; ++k) {
    A(k, 0) = std::cbrt(table.rows[k].mass_amu);
    A(k, 1) = 1.0;
    y(k) = table.rows[k].diameter_pm;
  }
  // Degenerate abscissas (all equal masses) make the design matrix rank 1.
  if ((A.col(0).array() - A(0, 0)).abs().maxCoeff() < 1e-12) {
    throw std::invalid_argument("noble_gas_fit: degenerate masses (rank loss)");
  }
  const Eigen::Vector2d beta =
      A.colPivHouseholderQr().solve(y);
  LinearFit fit;
  fit.slope = beta[0];
  fit.intercept = beta[1];
  fit.residuals.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    fit.residuals[k] = y(k) - (beta[0] * A(k, 0) + beta[1]);
  }
  return fit;
}

} // namespace randgas
