#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "randgas/geometry.hpp"
#include "randgas/rng.hpp"

namespace randgas {

// Instantaneous state of the K-sphere system in a periodic box.
struct ParticleSet {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  Box3 box;
  double time = 0.0;

  [[nodiscard]] int K() const { return static_cast<int>(positions.size()); }
  [[nodiscard]] double kinetic_energy() const;
  [[nodiscard]] Vec3 total_momentum() const;
};

// Initial-condition family: the equilibrium-style Gaussian draw, or a
// deterministic two-speed marginal for relaxation experiments.
enum class InitKind { maxwell_shell, two_speed };

struct SimConfig {
  int K = 2;
  ContactParams contact;
  Box3 box;
  double energy_E = 1.0;
  double dt_max = 0.0;   // 0 = derive the largest admissible value
  double t_end = 1.0;
  std::uint64_t seed = 0;
  int ensemble_size = 1;
  InitKind init = InitKind::maxwell_shell;
};

// Largest step that keeps any pair's separation change within alpha*sigma:
// relative speeds are bounded by 2*sqrt(E) on the fixed-energy shell.
double max_admissible_dt(const ContactParams& p, double energy_E);

void validate(const SimConfig& cfg);

// Candidate collision pair with its current intensity and thinning bound.
struct PairEvent {
  int i = 0;
  int j = 0;
  double intensity = 0.0;
  double bound = 0.0;
};

// Collision intensity of an (i, j) pair:
//   lambda * Theta(d.(vj-vi)) * delta_{alpha*sigma}(|d| - sigma) * dhat.(vj-vi)
// with d = xi - xj (minimum image in the box overload). Zero when the spheres
// are receding or outside the contact zone.
double pair_intensity(const Vec3& xi, const Vec3& xj, const Vec3& vi,
                      const Vec3& vj, const ContactParams& p);
double pair_intensity(const Vec3& xi, const Vec3& xj, const Vec3& vi,
                      const Vec3& vj, const ContactParams& p, const Box3& box);

// Global thinning bound lambda * delta_{alpha*sigma}(0) * 2*sqrt(E); the
// intensity of any pair never exceeds it while total energy is E.
double intensity_bound(const ContactParams& p, double energy_E);

// i.i.d. uniform positions; velocities i.i.d. normal, then shifted to zero
// total momentum and rescaled so the total kinetic energy is exactly E.
ParticleSet init_state(const SimConfig& cfg, Rng& rng);

// Same constraints, but velocities start at +/- v0 along x (half each way):
// a deterministic far-from-equilibrium marginal for relaxation studies.
ParticleSet init_state_two_speed(const SimConfig& cfg, Rng& rng);

struct CollisionEvent {
  double t = 0.0;
  int i = 0;
  int j = 0;
  Vec3 n{0, 0, 0}; // collision normal used in the velocity exchange
};

// Advance the state by dt: free flight plus point-process collisions
// simulated by thinning against the global bound. Accepted events are
// appended to *events when provided.
void step(ParticleSet& state, double dt, const ContactParams& p, Rng& rng,
          std::vector<CollisionEvent>* events = nullptr);

struct Observer {
  double interval = 0.0; // simulation-time spacing; 0 = every step
  std::function<void(int realization, const ParticleSet&)> fn;
};

struct RealizationRecord {
  std::uint64_t stream_seed = 0;
  std::uint64_t event_count = 0;
  double final_energy_drift = 0.0; // |E(t_end) - E(0)| / E(0)
  double wall_seconds = 0.0;
  ParticleSet final_state;
};

struct RunRecord {
  std::vector<RealizationRecord> realizations;
  std::uint64_t total_events = 0;
};

// Run cfg.ensemble_size independent realizations (RNG streams derived from
// cfg.seed by realization index). Observers fire at t = 0 and then on their
// interval schedule; events are delivered to event_sink in realization order,
// so output is deterministic for any thread count (bitwise so on one thread).
RunRecord run(const SimConfig& cfg, const std::vector<Observer>& observers = {},
              const std::function<void(int, const CollisionEvent&)>& event_sink =
                  nullptr,
              int n_threads = 1);

} // namespace randgas
