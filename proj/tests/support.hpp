#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls into the code under test for the values it derives.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "mstsp/geometry.hpp"
#include "mstsp/model.hpp"
#include "mstsp/oracle.hpp"

namespace mstsp::testing {

// Rest-to-rest motion -------------------------------------------------------

/// Farthest distance reachable in time T starting and ending at rest, with
/// |acceleration| <= a and speed <= v. Speed is min(a t, v, a (T - t)); the
/// integral is taken by Simpson's rule on each polynomial piece.
inline double reach(double T, double v, double a) {
  auto speed = [&](double t) { return std::min({a * t, v, a * (T - t)}); };
  auto simpson = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    return (hi - lo) / 6.0 * (speed(lo) + 4.0 * speed(0.5 * (lo + hi)) + speed(hi));
  };
  const double k1 = std::min(v / a, 0.5 * T);
  const double k2 = T - k1;
  return simpson(0.0, k1) + simpson(k1, k2) + simpson(k2, T);
}

/// Minimum time to cover d, found by bisection on reach().
inline double integrated_travel_time(double d, double v, double a) {
  if (d == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (reach(hi, v, a) < d) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reach(mid, v, a) < d ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Instances -----------------------------------------------------------------

/// Random segments scattered around a depot at the origin; c_max is left
/// generous so every assignment is budget-feasible until a test tightens it.
inline Instance random_instance(std::uint64_t seed, std::size_t n_segments, double area = 400.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-area, area);
  std::uniform_real_distribution<double> len(30.0, 150.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  Instance inst;
  int pid = 1;
  for (std::size_t k = 1; k <= n_segments; ++k) {
    const Point a{coord(rng), coord(rng), 0.0};
    const double l = len(rng), t = ang(rng);
    const Point b{a.x + l * std::cos(t), a.y + l * std::sin(t), 0.0};
    inst.pylons.push_back({pid, a});
    inst.pylons.push_back({pid + 1, b});
    inst.segments.push_back({static_cast<int>(k), pid, pid + 1});
    pid += 2;
  }
  inst.c_max = 1e9;
  return inst;
}

/// Every distinct solution with at most `max_tours` non-empty tours, by
/// inserting segments 1..n_s one at a time into any slot of an existing tour
/// or into a fresh tour. Tours are opened in order of their smallest segment,
/// so each solution appears exactly once.
inline void for_each_solution(std::size_t n_segments, std::size_t max_tours,
                              const std::function<void(const std::vector<std::vector<Visit>>&)>& fn) {
  std::vector<std::vector<Visit>> tours;
  std::function<void(int)> rec = [&](int seg) {
    if (seg > static_cast<int>(n_segments)) {
      fn(tours);
      return;
    }
    for (Direction d : {Direction::AB, Direction::BA}) {
      for (std::size_t m = 0; m < tours.size(); ++m) {
        for (std::size_t q = 0; q <= tours[m].size(); ++q) {
          tours[m].insert(tours[m].begin() + static_cast<std::ptrdiff_t>(q), Visit{seg, d});
          rec(seg + 1);
          tours[m].erase(tours[m].begin() + static_cast<std::ptrdiff_t>(q));
        }
      }
      if (tours.size() < max_tours) {
        tours.push_back({Visit{seg, d}});
        rec(seg + 1);
        tours.pop_back();
      }
    }
  };
  rec(1);
}

/// Tour cost summed straight from the arc definitions.
inline double plain_tour_cost(const std::vector<Visit>& tour, const CostMatrix& m) {
  if (tour.empty()) return m(0, 1);
  double c = m(0, 2 * tour.front().segment + static_cast<int>(tour.front().direction));
  for (std::size_t k = 1; k < tour.size(); ++k) {
    c += m(2 * tour[k - 1].segment + static_cast<int>(tour[k - 1].direction),
           2 * tour[k].segment + static_cast<int>(tour[k].direction));
  }
  return c + m(2 * tour.back().segment + static_cast<int>(tour.back().direction), 1);
}

/// Brute-force optimum over every solution with at most `max_tours` tours
/// within c_max. Infinity when none exists.
inline double brute_force_optimum(const CostMatrix& m, double c_max, std::size_t max_tours) {
  double best = std::numeric_limits<double>::infinity();
  for_each_solution(m.segment_count(), max_tours, [&](const std::vector<std::vector<Visit>>& tours) {
    double total = 0.0;
    for (const auto& t : tours) {
      const double c = plain_tour_cost(t, m);
      if (c > c_max) return;
      total += c;
    }
    best = std::min(best, total);
  });
  return best;
}

/// Instance whose optimum needs one or two tours: c_max is drawn between the
/// widest single-segment tour and the one-tour optimum.
inline Instance corpus_instance(std::uint64_t seed, std::size_t n_segments) {
  Instance inst = random_instance(seed, n_segments);
  const CostMatrix m = build_cost_matrix(inst);
  double widest = 0.0;
  for (std::size_t id = 1; id <= n_segments; ++id) {
    widest = std::max(widest, single_segment_tour_cost(m, static_cast<int>(id)));
  }
  const double one_tour = exact_solve(m, 1e18, 1).solution.value().total_cost;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double frac = std::uniform_real_distribution<double>(0.55, 1.05)(rng);
  for (;; frac += 0.05) {
    inst.c_max = std::ceil(std::max(1.01 * widest, frac * one_tour));
    if (exact_solve(m, inst.c_max, 2).solution) return inst;
  }
}

}  // namespace mstsp::testing
