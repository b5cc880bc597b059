#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "randgas/dynamics.hpp"
#include "randgas/geometry.hpp"

namespace randgas {

struct Histogram1D {
  std::vector<double> edges;  // strictly increasing; counts has one fewer entry
  std::vector<double> counts;
  double weight_total = 0.0;

  static Histogram1D uniform(double lo, double hi, int n_bins);
  // Accumulate weight w at x; samples outside [edges.front(), edges.back())
  // are dropped (weight_total only tracks what landed in a bin).
  void add(double x, double w = 1.0);
  void merge(const Histogram1D& other);
};

// Kinetic temperature 2E/(3K) of one state.
double temperature(const ParticleSet& state);

// --- distribution distances -------------------------------------------

double normal_cdf(double x, double mean, double variance);

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// KS distance of all pooled velocity components against the centered normal
// with the ensemble's kinetic temperature.
double maxwellian_distance(const std::vector<ParticleSet>& states);

// --- pair structure ------------------------------------------------------

struct PairCorrelation {
  std::vector<double> r_edges;
  std::vector<double> g_values; // NaN marks an empty (missing) shell
};

// Radial distribution estimate over pooled states; shells normalized by the
// exact ideal-gas expectation (shell volume / box volume), valid while
// r_max <= min box side / 2.
PairCorrelation pair_correlation(const std::vector<ParticleSet>& states,
                                 const ContactParams& p, double r_max,
                                 int n_bins);

// Ratio of per-volume pair densities between the overlapped band
// [sigma/2, sigma(1-alpha)] and the separated band [sigma(1+alpha), 3 sigma/2].
// stderr_out (optional) receives the Poisson-propagated standard error;
// returns NaN when either band is empty.
double overlap_ratio(const std::vector<ParticleSet>& states,
                     const ContactParams& p, double* stderr_out = nullptr);

// --- entropy proxies -------------------------------------------------

// KL divergence of the pooled per-component velocity histogram from
// normal(0, theta), with Jeffreys 0.5 pseudo-counts on the empirical bins.
// The binning is derived from theta alone (fixed across an energy-conserving
// run, so a time series of calls is comparable).
double velocity_kl(const std::vector<ParticleSet>& states, int n_bins = 64);

// Estimate of the small positive bias velocity_kl reports for samples drawn
// exactly from the Maxwellian: mean KL over n_control synthetic ensembles of
// the same pooled size.
double velocity_kl_bias_floor(std::size_t n_pooled_samples, double theta,
                              Rng& rng, int n_bins = 64, int n_control = 8);

struct KlIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
};

// Discrete check of the marginal decomposition of the weighted KL functional
// P(a,b) = sum a*log(a/b): for a joint F with marginals f1, f2,
//   P(F, psi.*p1*p2') = P(F, psi.*f1*f2') + P(f1,p1) + P(f2,p2).
KlIdentity kl_marginal_identity_check(const Eigen::MatrixXd& F,
                                      const Eigen::MatrixXd& psi,
                                      const Eigen::VectorXd& p1,
                                      const Eigen::VectorXd& p2);

// --- atomic-diameter fit ---------------------------------------------

struct NobleGasRow {
  std::string element;
  double mass_amu = 0.0;
  double diameter_pm = 0.0;
};

struct NobleGasTable {
  std::vector<NobleGasRow> rows;
};

// Whitespace-delimited rows (element, mass_amu, diameter_pm); '#' comments.
NobleGasTable load_noble_gas_table(const std::string& path);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

// Least-squares line of diameter against cube root of mass.
LinearFit noble_gas_fit(const NobleGasTable& table);

} // namespace randgas
