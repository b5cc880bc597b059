#include "randgas/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

#include "randgas/mollifier.hpp"

namespace randgas {

double ParticleSet::kinetic_energy() const {
  double e = 0.0;
  for (const Vec3& v : velocities) e += 0.5 * v.squaredNorm();
  return e;
}

Vec3 ParticleSet::total_momentum() const {
  Vec3 p = Vec3::Zero();
  for (const Vec3& v : velocities) p += v;
  return p;
}

double max_admissible_dt(const ContactParams& p, double energy_E) {
  return p.alpha * p.sigma / (2.0 * std::sqrt(energy_E));
}

void validate(const SimConfig& cfg) {
  if (cfg.K < 2) throw std::invalid_argument("SimConfig: K must be >= 2");
  validate(cfg.box, cfg.contact);
  if (!(cfg.energy_E > 0.0)) {
    throw std::invalid_argument("SimConfig: energy_E must be > 0");
  }
  if (cfg.dt_max != 0.0 &&
      cfg.dt_max > max_admissible_dt(cfg.contact, cfg.energy_E) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "SimConfig: dt_max exceeds alpha*sigma/(2*sqrt(E)); a sphere pair "
        "could cross the contact zone unresolved");
  }
  if (!(cfg.t_end >= 0.0)) {
    throw std::invalid_argument("SimConfig: t_end must be >= 0");
  }
  if (cfg.ensemble_size < 1) {
    throw std::invalid_argument("SimConfig: ensemble_size must be >= 1");
  }
}

namespace {

double gated_intensity(const Vec3& d, const Vec3& vi, const Vec3& vj,
                       const ContactParams& p) {
  const double r = d.norm();
  if (!(r > 0.0)) return 0.0;
  const double closing = d.dot(vj - vi) / r;
  if (closing <= 0.0) return 0.0; // receding or grazing
  const double delta = mollifier(r - p.sigma, p.alpha * p.sigma);
  return p.lambda * delta * closing;
}

} // namespace

double pair_intensity(const Vec3& xi, const Vec3& xj, const Vec3& vi,
                      const Vec3& vj, const ContactParams& p) {
  return gated_intensity(xi - xj, vi, vj, p);
}

double pair_intensity(const Vec3& xi, const Vec3& xj, const Vec3& vi,
                      const Vec3& vj, const ContactParams& p, const Box3& box) {
  return gated_intensity(min_image(xi, xj, box), vi, vj, p);
}

double intensity_bound(const ContactParams& p, double energy_E) {
  return p.lambda * mollifier(0.0, p.alpha * p.sigma) * 2.0 *
         std::sqrt(energy_E);
}

namespace {

void finalize_velocities(std::vector<Vec3>& v, double energy_E) {
  const int K = static_cast<int>(v.size());
  Vec3 mean = Vec3::Zero();
  for (const Vec3& vi : v) mean += vi;
  mean /= static_cast<double>(K);
  double e = 0.0;
  for (Vec3& vi : v) {
    vi -= mean;
    e += 0.5 * vi.squaredNorm();
  }
  if (!(e > 0.0)) {
    throw std::runtime_error("init_state: degenerate zero-velocity draw");
  }
  const double scale = std::sqrt(energy_E / e);
  for (Vec3& vi : v) vi *= scale;
}

} // namespace

ParticleSet init_state(const SimConfig& cfg, Rng& rng) {
  validate(cfg);
  ParticleSet s;
  s.box = cfg.box;
  s.time = 0.0;
  s.positions.reserve(cfg.K);
  s.velocities.reserve(cfg.K);
  for (int i = 0; i < cfg.K; ++i) {
    s.positions.emplace_back(rng.uniform(0.0, cfg.box.side_lengths.x()),
                             rng.uniform(0.0, cfg.box.side_lengths.y()),
                             rng.uniform(0.0, cfg.box.side_lengths.z()));
  }
  for (int i = 0; i < cfg.K; ++i) {
    s.velocities.emplace_back(rng.normal(), rng.normal(), rng.normal());
  }
  finalize_velocities(s.velocities, cfg.energy_E);
  return s;
}

ParticleSet init_state_two_speed(const SimConfig& cfg, Rng& rng) {
  validate(cfg);
  if (cfg.K % 2 != 0) {
    throw std::invalid_argument("init_state_two_speed: K must be even");
  }
  ParticleSet s;
  s.box = cfg.box;
  s.time = 0.0;
  s.positions.reserve(cfg.K);
  for (int i = 0; i < cfg.K; ++i) {
    s.positions.emplace_back(rng.uniform(0.0, cfg.box.side_lengths.x()),
                             rng.uniform(0.0, cfg.box.side_lengths.y()),
                             rng.uniform(0.0, cfg.box.side_lengths.z()));
  }
  const double v0 = std::sqrt(2.0 * cfg.energy_E / cfg.K);
  s.velocities.assign(cfg.K, Vec3::Zero());
  for (int i = 0; i < cfg.K; ++i) {
    s.velocities[i] = Vec3((i < cfg.K / 2) ? v0 : -v0, 0.0, 0.0);
  }
  return s;
}

namespace {

// Uniform cell grid over the box for candidate-pair search. Cells are at
// least sigma*(1+2*alpha) wide: a pair farther apart than that at the start
// of a step cannot reach the contact zone within the step (separation can
// change by at most 2*sqrt(E)*dt <= alpha*sigma).
struct CellGrid {
  Eigen::Vector3i dims;
  Vec3 inv_cell;
  std::vector<std::vector<int>> cells;
  bool degenerate = false; // box too small for 3 cells per side: scan all pairs

  CellGrid(const ParticleSet& s, double cutoff) {
    for (int d = 0; d < 3; ++d) {
      dims[d] = static_cast<int>(std::floor(s.box.side_lengths[d] / cutoff));
      if (dims[d] < 3) degenerate = true;
    }
    if (degenerate) return;
    for (int d = 0; d < 3; ++d) {
      inv_cell[d] = dims[d] / s.box.side_lengths[d];
    }
    cells.resize(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
    for (int i = 0; i < s.K(); ++i) {
      cells[index_of(wrap_position(s.positions[i], s.box))].push_back(i);
    }
  }

  [[nodiscard]] std::size_t index_of(const Vec3& x) const {
    Eigen::Vector3i c;
    for (int d = 0; d < 3; ++d) {
      c[d] = std::min(static_cast<int>(x[d] * inv_cell[d]), dims[d] - 1);
    }
    return (static_cast<std::size_t>(c[0]) * dims[1] + c[1]) * dims[2] + c[2];
  }

  template <typename F>
  void for_candidate_pairs(const ParticleSet& s, double cutoff2, F&& f) const {
    if (degenerate) {
      for (int i = 0; i < s.K(); ++i) {
        for (int j = i + 1; j < s.K(); ++j) {
          if (min_image(s.positions[i], s.positions[j], s.box).squaredNorm() <=
              cutoff2) {
            f(i, j);
          }
        }
      }
      return;
    }
    for (int cx = 0; cx < dims[0]; ++cx) {
      for (int cy = 0; cy < dims[1]; ++cy) {
        for (int cz = 0; cz < dims[2]; ++cz) {
          const std::size_t c0 =
              (static_cast<std::size_t>(cx) * dims[1] + cy) * dims[2] + cz;
          // half-neighborhood so each cell pair is visited once
          for (int n = 0; n < 14; ++n) {
            static const int off[14][3] = {
                {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0},
                {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {1, -1, 0}, {1, 0, -1},
                {0, 1, -1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
            const int nx = (cx + off[n][0] + dims[0]) % dims[0];
            const int ny = (cy + off[n][1] + dims[1]) % dims[1];
            const int nz = (cz + off[n][2] + dims[2]) % dims[2];
            const std::size_t c1 =
                (static_cast<std::size_t>(nx) * dims[1] + ny) * dims[2] + nz;
            if (n > 0 && c1 == c0) continue; // tiny grids alias neighbors
            if (n > 0 && c1 < c0) continue;  // visited from the other side
            const auto& a = cells[c0];
            const auto& b = cells[c1];
            if (n == 0) {
              for (std::size_t p = 0; p < a.size(); ++p) {
                for (std::size_t q = p + 1; q < a.size(); ++q) {
                  if (min_image(s.positions[a[p]], s.positions[a[q]], s.box)
                          .squaredNorm() <= cutoff2) {
                    f(std::min(a[p], a[q]), std::max(a[p], a[q]));
                  }
                }
              }
            } else {
              for (int i : a) {
                for (int j : b) {
                  if (min_image(s.positions[i], s.positions[j], s.box)
                          .squaredNorm() <= cutoff2) {
                    f(std::min(i, j), std::max(i, j));
                  }
                }
              }
            }
          }
        }
      }
    }
  }
};

struct Proposal {
  double t;
  int pair_index;
  bool operator>(const Proposal& other) const {
    // earlier time first; ties (measure zero) broken by pair index
    if (t != other.t) return t > other.t;
    return pair_index > other.pair_index;
  }
};

} // namespace

void step(ParticleSet& state, double dt, const ContactParams& p, Rng& rng,
          std::vector<CollisionEvent>* events) {
  if (!(dt > 0.0)) {
    if (dt == 0.0) return;
    throw std::invalid_argument("step: dt must be >= 0");
  }
  const double energy = state.kinetic_energy();
  const double dt_cap = max_admissible_dt(p, energy) * (1.0 + 1e-12);
  if (dt > dt_cap) {
    throw std::invalid_argument(
        "step: dt exceeds alpha*sigma/(2*sqrt(E)) for this state");
  }

  const double t0 = state.time;
  const double t1 = t0 + dt;

  if (p.lambda > 0.0) {
    const double bound = intensity_bound(p, energy);
    const double cutoff = p.sigma * (1.0 + 2.0 * p.alpha);

    std::vector<std::pair<int, int>> pairs;
    CellGrid grid(state, cutoff);
    grid.for_candidate_pairs(state, cutoff * cutoff,
                             [&](int i, int j) { pairs.emplace_back(i, j); });
    std::sort(pairs.begin(), pairs.end()); // deterministic proposal order

    // Per-particle lazy positions: advance on demand between jumps.
    std::vector<double> last_t(state.positions.size(), t0);
    auto position_at = [&](int i, double t) -> Vec3 {
      return state.positions[i] + (t - last_t[i]) * state.velocities[i];
    };

    std::priority_queue<Proposal, std::vector<Proposal>, std::greater<>> queue;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double t_first = t0 + rng.exponential(bound);
      if (t_first <= t1) queue.push({t_first, static_cast<int>(k)});
    }

    while (!queue.empty()) {
      const Proposal prop = queue.top();
      queue.pop();
      const auto [i, j] = pairs[prop.pair_index];
      const Vec3 xi = position_at(i, prop.t);
      const Vec3 xj = position_at(j, prop.t);
      const double h = pair_intensity(xi, xj, state.velocities[i],
                                      state.velocities[j], p, state.box);
      if (rng.uniform() * bound < h) {
        state.positions[i] = xi;
        state.positions[j] = xj;
        last_t[i] = prop.t;
        last_t[j] = prop.t;
        const Vec3 d = min_image(xi, xj, state.box);
        const Vec3 n = d / d.norm();
        auto [vi2, vj2] = collide(state.velocities[i], state.velocities[j], n);
        state.velocities[i] = vi2;
        state.velocities[j] = vj2;
        if (events) events->push_back({prop.t, i, j, n});
      }
      const double t_next = prop.t + rng.exponential(bound);
      if (t_next <= t1) queue.push({t_next, prop.pair_index});
    }

    for (int i = 0; i < state.K(); ++i) {
      state.positions[i] = position_at(i, t1);
    }
  } else {
    for (int i = 0; i < state.K(); ++i) {
      state.positions[i] += dt * state.velocities[i];
    }
  }

  for (int i = 0; i < state.K(); ++i) {
    state.positions[i] = wrap_position(state.positions[i], state.box);
  }
  state.time = t1;
}

namespace {

RealizationRecord run_one(const SimConfig& cfg, int realization,
                          const std::vector<Observer>& observers,
                          std::vector<CollisionEvent>& events) {
  const auto wall_start = std::chrono::steady_clock::now();
  RealizationRecord rec;
  rec.stream_seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(realization));
  Rng rng(rec.stream_seed);
  ParticleSet state = cfg.init == InitKind::two_speed
                          ? init_state_two_speed(cfg, rng)
                          : init_state(cfg, rng);
  const double e0 = state.kinetic_energy();

  std::vector<double> next_fire(observers.size(), 0.0);
  auto fire_due = [&](double now) {
    for (std::size_t o = 0; o < observers.size(); ++o) {
      const double interval = observers[o].interval;
      if (interval <= 0.0) {
        observers[o].fn(realization, state);
        continue;
      }
      const double eps = 1e-12 * std::max(1.0, interval);
      if (now + eps >= next_fire[o]) {
        observers[o].fn(realization, state);
        do {
          next_fire[o] += interval;
        } while (next_fire[o] <= now + eps);
      }
    }
  };

  const double dt_max =
      cfg.dt_max > 0.0 ? cfg.dt_max : max_admissible_dt(cfg.contact, cfg.energy_E);
  fire_due(0.0);
  while (state.time < cfg.t_end - 1e-15) {
    const double dt = std::min(dt_max, cfg.t_end - state.time);
    step(state, dt, cfg.contact, rng, &events);
    fire_due(state.time);
  }

  rec.event_count = events.size();
  rec.final_energy_drift = std::abs(state.kinetic_energy() - e0) / e0;
  rec.final_state = std::move(state);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();
  return rec;
}

} // namespace

RunRecord run(const SimConfig& cfg, const std::vector<Observer>& observers,
              const std::function<void(int, const CollisionEvent&)>& event_sink,
              int n_threads) {
  validate(cfg);
  RunRecord out;
  out.realizations.resize(cfg.ensemble_size);
  std::vector<std::vector<CollisionEvent>> events(cfg.ensemble_size);

  if (n_threads <= 1 || cfg.ensemble_size == 1) {
    for (int r = 0; r < cfg.ensemble_size; ++r) {
      out.realizations[r] = run_one(cfg, r, observers, events[r]);
    }
  } else {
    // Observer callbacks may touch shared accumulators; serialize them.
    std::mutex observer_mutex;
    std::vector<Observer> locked;
    locked.reserve(observers.size());
    for (const Observer& o : observers) {
      locked.push_back({o.interval, [&observer_mutex, &o](int r,
                                                          const ParticleSet& s) {
                          std::lock_guard<std::mutex> hold(observer_mutex);
                          o.fn(r, s);
                        }});
    }
    std::atomic<int> next{0};
    const int workers =
        std::min<int>(n_threads, cfg.ensemble_size);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r; (r = next.fetch_add(1)) < cfg.ensemble_size;) {
          out.realizations[r] = run_one(cfg, r, locked, events[r]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (int r = 0; r < cfg.ensemble_size; ++r) {
    out.total_events += out.realizations[r].event_count;
    if (event_sink) {
      for (const CollisionEvent& e : events[r]) event_sink(r, e);
    }
  }
  return out;
}

} // namespace randgas
