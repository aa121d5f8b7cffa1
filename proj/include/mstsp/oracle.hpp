#pragma once

// Exhaustive reference solver for desk-scale instances.
//
// Depth-first search that grows tours by appending (segment, direction)
// visits, closes the open tour, or opens the next one. Tours are generated
// in increasing order of their first segment id so each unordered set of
// tours is enumerated once. Pruning uses only admissible bounds (all costs
// are nonnegative), so no optimal completion is ever cut.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mstsp/geometry.hpp"
#include "mstsp/model.hpp"

namespace mstsp {

struct OracleLimits {
  std::size_t max_segments = 8;
  std::size_t max_tours = 3;
  std::uint64_t node_budget = 50'000'000;
};

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  std::optional<Solution> solution;  // nullopt: no feasible solution with <= n_t tours
  std::uint64_t nodes = 0;
};

namespace detail {

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const CostMatrix& m, double c_max, std::size_t n_tours, std::uint64_t budget,
                   std::vector<int> segment_order)
      : m_(m), c_max_(c_max), n_tours_(n_tours), budget_(budget), order_(std::move(segment_order)) {
    ns_ = m.segment_count();
    used_.assign(ns_ + 1, false);
    min_in_.assign(ns_ + 1, std::numeric_limits<double>::infinity());
    min_return_ = std::numeric_limits<double>::infinity();
    for (std::size_t id = 1; id <= ns_; ++id) {
      for (std::size_t v : {2 * id, 2 * id + 1}) {
        for (std::size_t from = 0; from < m.size(); ++from) min_in_[id] = std::min(min_in_[id], m(from, v));
        min_return_ = std::min(min_return_, m(v, 1));
      }
    }
    for (std::size_t id = 1; id <= ns_; ++id) remaining_lb_ += min_in_[id];
  }

  OracleResult run() {
    for (int first : order_) open_tour(first);
    OracleResult r;
    r.nodes = nodes_;
    if (best_) r.solution = Evaluator(m_, c_max_).make_solution(*best_);
    return r;
  }

 private:
  void tick() {
    if (++nodes_ > budget_) {
      throw OracleRefusal("oracle node budget of " + std::to_string(budget_) + " states exhausted");
    }
  }

  std::size_t vertex(int seg, Direction d) const { return 2 * static_cast<std::size_t>(seg) + static_cast<std::size_t>(d); }

  void open_tour(int first) {
    if (used_[static_cast<std::size_t>(first)] || tours_.size() >= n_tours_) return;
    if (!tours_.empty() && first <= tours_.back().front().segment) return;
    tours_.emplace_back();
    for (Direction d : {Direction::AB, Direction::BA}) extend(first, d, 0, 0.0);
    tours_.pop_back();
  }

  // Appends (seg, d) to the open tour whose path cost so far is `open_cost`
  // ending at vertex `last`.
  void extend(int seg, Direction d, std::size_t last, double open_cost) {
    tick();
    const std::size_t v = vertex(seg, d);
    const double cost = open_cost + m_(last, v);
    const auto sid = static_cast<std::size_t>(seg);
    if (cost + min_return_ > c_max_) return;
    const double lb = closed_total_ + cost + (remaining_lb_ - min_in_[sid]) + min_return_;
    if (best_ && lb > best_cost_ + kCostEps) return;

    used_[sid] = true;
    remaining_lb_ -= min_in_[sid];
    ++used_count_;
    tours_.back().push_back({seg, d});

    // Close the open tour.
    const double closed = cost + m_(v, 1);
    if (closed <= c_max_) {
      closed_total_ += closed;
      if (used_count_ == ns_) {
        consider();
      } else {
        for (int next : order_) open_tour(next);
      }
      closed_total_ -= closed;
    }
    // Keep extending.
    for (int next : order_) {
      if (used_[static_cast<std::size_t>(next)]) continue;
      for (Direction nd : {Direction::AB, Direction::BA}) extend(next, nd, v, cost);
    }

    tours_.back().pop_back();
    --used_count_;
    remaining_lb_ += min_in_[sid];
    used_[sid] = false;
  }

  void consider() {
    const double total = closed_total_;
    if (best_ && total > best_cost_ + kCostEps) return;
    auto canon = tours_;
    std::sort(canon.begin(), canon.end());
    if (!best_ || total < best_cost_ - kCostEps || canon < *best_) {
      best_ = std::move(canon);
      best_cost_ = total;
    }
  }

  const CostMatrix& m_;
  double c_max_;
  std::size_t n_tours_;
  std::uint64_t budget_;
  std::vector<int> order_;
  std::size_t ns_ = 0;
  std::vector<bool> used_;
  std::vector<double> min_in_;
  double min_return_ = 0.0;
  double remaining_lb_ = 0.0;
  double closed_total_ = 0.0;
  std::size_t used_count_ = 0;
  std::vector<std::vector<Visit>> tours_;
  std::optional<std::vector<std::vector<Visit>>> best_;
  double best_cost_ = 0.0;
  std::uint64_t nodes_ = 0;
};

inline void check_limits(std::size_t ns, std::size_t n_tours, const OracleLimits& limits) {
  if (ns > limits.max_segments) {
    throw OracleRefusal("instance has " + std::to_string(ns) + " segments, above max_segments " +
                        std::to_string(limits.max_segments));
  }
  if (n_tours > limits.max_tours) {
    throw OracleRefusal("n_t " + std::to_string(n_tours) + " above max_tours " + std::to_string(limits.max_tours));
  }
}

}  // namespace detail

/// Minimum-total-cost solution using at most `n_tours` non-empty tours with
/// every tour within c_max. Ties resolve to the lexicographically smallest
/// canonical form. `segment_order` only changes exploration order.
inline OracleResult exact_solve(const CostMatrix& m, double c_max, std::size_t n_tours, const OracleLimits& limits = {},
                                std::vector<int> segment_order = {}) {
  if (n_tours < 1) throw std::invalid_argument("exact_solve: n_t must be >= 1");
  const std::size_t ns = m.segment_count();
  detail::check_limits(ns, n_tours, limits);
  if (segment_order.empty()) {
    for (std::size_t id = 1; id <= ns; ++id) segment_order.push_back(static_cast<int>(id));
  }
  return detail::ExhaustiveSearch(m, c_max, n_tours, limits.node_budget, std::move(segment_order)).run();
}

inline OracleResult exact_solve(const Instance& inst, const CostMatrix& m, std::size_t n_tours,
                                const OracleLimits& limits = {}) {
  return exact_solve(m, inst.c_max, n_tours, limits);
}

struct MinToursResult {
  std::size_t n_tours = 0;
  Solution solution;
};

/// Smallest tour count admitting a feasible solution, with its optimum.
inline MinToursResult exact_min_tours(const CostMatrix& m, double c_max, const OracleLimits& limits = {}) {
  const std::size_t ns = m.segment_count();
  detail::check_limits(ns, 1, limits);
  const std::size_t top = std::min(ns, limits.max_tours);
  for (std::size_t k = 1; k <= top; ++k) {
    auto r = exact_solve(m, c_max, k, limits);
    if (r.solution) return {k, std::move(*r.solution)};
  }
  if (top < ns) {
    throw OracleRefusal("no feasible solution within max_tours " + std::to_string(limits.max_tours));
  }
  throw InfeasibleInstance("no feasible solution even with one tour per segment");
}

inline MinToursResult exact_min_tours(const Instance& inst, const CostMatrix& m, const OracleLimits& limits = {}) {
  return exact_min_tours(m, inst.c_max, limits);
}

}  // namespace mstsp
