#pragma once

// Solution representation, tour costing with the soft budget penalty,
// feasibility reports and deviation metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mstsp/geometry.hpp"

namespace mstsp {

/// Absolute tolerance for cost comparisons, in seconds.
inline constexpr double kCostEps = 1e-9;

struct Visit {
  int segment = 0;
  Direction direction = Direction::AB;

  friend bool operator==(const Visit&, const Visit&) = default;
  friend auto operator<=>(const Visit&, const Visit&) = default;
};

struct Tour {
  std::vector<Visit> visits;
  double cost = 0.0;       // c(T)
  double penalized = 0.0;  // c_con(T)

  bool empty() const { return visits.empty(); }
};

struct Solution {
  std::vector<Tour> tours;
  double total_cost = 0.0;
  double total_penalized_cost = 0.0;

  std::size_t visit_count() const {
    std::size_t n = 0;
    for (const auto& t : tours) n += t.visits.size();
    return n;
  }
  std::size_t nonempty_tours() const {
    return static_cast<std::size_t>(
        std::count_if(tours.begin(), tours.end(), [](const Tour& t) { return !t.empty(); }));
  }
};

struct PenaltyConfig {
  double k_c = 1000.0;
};

/// Soft budget: c if within c_max, else c + (c - c_max) * k_c.
inline double constrained_cost(double c, double c_max, PenaltyConfig k = {}) {
  if (c <= c_max) return c;
  return c + (c - c_max) * k.k_c;
}

inline std::size_t vertex_of(const Visit& v, std::size_t n_segments) {
  return vertex_of(v.segment, v.direction, n_segments);
}

/// c(T) from the matrix. Empty tours cost the direct depot transfer, which
/// is zero when the depots coincide.
inline double tour_cost(const std::vector<Visit>& visits, const CostMatrix& m) {
  const std::size_t ns = m.segment_count();
  if (visits.empty()) return m(0, 1);
  double c = 0.0;
  std::size_t prev = 0;
  for (const auto& v : visits) {
    const std::size_t cur = vertex_of(v, ns);
    c += m(prev, cur);
    prev = cur;
  }
  return c + m(prev, 1);
}

/// Bundles what is needed to cost tours and solutions.
class Evaluator {
 public:
  Evaluator(const CostMatrix& matrix, double c_max, PenaltyConfig penalty = {})
      : matrix_(&matrix), c_max_(c_max), penalty_(penalty) {}

  const CostMatrix& matrix() const { return *matrix_; }
  double c_max() const { return c_max_; }
  PenaltyConfig penalty() const { return penalty_; }
  std::size_t segment_count() const { return matrix_->segment_count(); }

  double arc(std::size_t from, std::size_t to) const { return (*matrix_)(from, to); }
  std::size_t vertex(const Visit& v) const { return vertex_of(v, segment_count()); }
  double penalize(double c) const { return constrained_cost(c, c_max_, penalty_); }

  void refresh(Tour& t) const {
    t.cost = tour_cost(t.visits, *matrix_);
    t.penalized = penalize(t.cost);
  }

  void refresh(Solution& s) const {
    s.total_cost = 0.0;
    s.total_penalized_cost = 0.0;
    for (auto& t : s.tours) {
      refresh(t);
      s.total_cost += t.cost;
      s.total_penalized_cost += t.penalized;
    }
  }

  /// Re-sums totals from cached tour costs.
  void resum(Solution& s) const {
    s.total_cost = 0.0;
    s.total_penalized_cost = 0.0;
    for (const auto& t : s.tours) {
      s.total_cost += t.cost;
      s.total_penalized_cost += t.penalized;
    }
  }

  Solution make_solution(std::vector<std::vector<Visit>> tours) const {
    Solution s;
    s.tours.reserve(tours.size());
    for (auto& v : tours) s.tours.push_back(Tour{std::move(v), 0.0, 0.0});
    refresh(s);
    return s;
  }

 private:
  const CostMatrix* matrix_;
  double c_max_;
  PenaltyConfig penalty_;
};

/// Drops empty tours and recomputes totals.
inline Solution prune_empty_tours(Solution s, const Evaluator& eval) {
  std::erase_if(s.tours, [](const Tour& t) { return t.empty(); });
  eval.refresh(s);
  return s;
}

/// Tours sorted lexicographically by visit sequence, empty tours removed.
/// Two solutions that differ only by tour order share a canonical form.
inline std::vector<std::vector<Visit>> canonical_form(const Solution& s) {
  std::vector<std::vector<Visit>> tours;
  for (const auto& t : s.tours) {
    if (!t.empty()) tours.push_back(t.visits);
  }
  std::sort(tours.begin(), tours.end());
  return tours;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t tour_hash(const std::vector<Visit>& visits) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& v : visits) {
    h = mix64(h ^ (static_cast<std::uint64_t>(v.segment) * 2 + static_cast<std::uint64_t>(v.direction)));
  }
  return h;
}

}  // namespace detail

/// Hash of the canonical form: order-sensitive within a tour, invariant
/// under permutation of tours, blind to empty tours.
inline std::uint64_t solution_hash(const Solution& s) {
  std::vector<std::uint64_t> hs;
  hs.reserve(s.tours.size());
  for (const auto& t : s.tours) {
    if (!t.empty()) hs.push_back(detail::tour_hash(t.visits));
  }
  std::sort(hs.begin(), hs.end());
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (auto x : hs) h = detail::mix64(h ^ x);
  return h;
}

// Feasibility ---------------------------------------------------------------

struct Violation {
  enum class Kind { Missing, Duplicated, OverBudget, InvalidSegment };
  Kind kind;
  int segment = 0;        // Missing / Duplicated / InvalidSegment
  std::size_t tour = 0;   // OverBudget
  double overshoot = 0.0; // OverBudget, seconds

  std::string describe() const {
    switch (kind) {
      case Kind::Missing: return "segment " + std::to_string(segment) + " missing";
      case Kind::Duplicated: return "segment " + std::to_string(segment) + " duplicated";
      case Kind::InvalidSegment: return "segment id " + std::to_string(segment) + " out of range";
      case Kind::OverBudget:
        return "tour " + std::to_string(tour) + " over budget by " + std::to_string(overshoot) + " s";
    }
    return {};
  }
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(Violation::Kind k) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [k](const Violation& v) { return v.kind == k; }));
  }
};

/// Checks coverage (each segment exactly once) and the per-tour budget.
/// Tour costs are recomputed from the matrix, not taken from the cache.
inline FeasibilityReport check_feasible(const Solution& s, const CostMatrix& m, double c_max) {
  FeasibilityReport r;
  const std::size_t ns = m.segment_count();
  std::vector<int> seen(ns + 1, 0);
  bool ids_ok = true;
  for (const auto& t : s.tours) {
    for (const auto& v : t.visits) {
      if (v.segment < 1 || static_cast<std::size_t>(v.segment) > ns) {
        r.violations.push_back({Violation::Kind::InvalidSegment, v.segment});
        ids_ok = false;
        continue;
      }
      ++seen[static_cast<std::size_t>(v.segment)];
    }
  }
  for (std::size_t id = 1; id <= ns; ++id) {
    if (seen[id] == 0) r.violations.push_back({Violation::Kind::Missing, static_cast<int>(id)});
    if (seen[id] > 1) r.violations.push_back({Violation::Kind::Duplicated, static_cast<int>(id)});
  }
  if (!ids_ok) return r;
  for (std::size_t k = 0; k < s.tours.size(); ++k) {
    if (s.tours[k].empty()) continue;
    const double c = tour_cost(s.tours[k].visits, m);
    if (c > c_max) r.violations.push_back({Violation::Kind::OverBudget, 0, k, c - c_max});
  }
  return r;
}

inline FeasibilityReport check_feasible(const Solution& s, const Instance& inst) {
  return check_feasible(s, build_cost_matrix(inst), inst.c_max);
}

/// Every segment 1..n_s appears exactly once.
inline bool covers_all(const Solution& s, std::size_t n_segments) {
  std::vector<int> seen(n_segments + 1, 0);
  for (const auto& t : s.tours) {
    for (const auto& v : t.visits) {
      if (v.segment < 1 || static_cast<std::size_t>(v.segment) > n_segments) return false;
      if (++seen[static_cast<std::size_t>(v.segment)] > 1) return false;
    }
  }
  return std::count(seen.begin() + 1, seen.end(), 1) == static_cast<std::ptrdiff_t>(n_segments);
}

// Metrics -------------------------------------------------------------------

/// Percentage deviation of `cost` from `ref_cost`. Used for both %PDB (best)
/// and %PDM (mean).
inline double percent_deviation(double cost, double ref_cost) {
  if (!(ref_cost > 0.0)) throw std::invalid_argument("reference cost must be positive");
  return (cost - ref_cost) / ref_cost * 100.0;
}

inline double pdb(double best_cost, double ref_cost) { return percent_deviation(best_cost, ref_cost); }
inline double pdm(double mean_cost, double ref_cost) { return percent_deviation(mean_cost, ref_cost); }

// Solution JSON -------------------------------------------------------------
//   { "tours": [[{"seg":int,"dir":"AB"|"BA"}...]...], "cost": f,
//     "feasible": bool, "per_tour_costs": [f...] }

inline nlohmann::json solution_to_json(const Solution& s, bool feasible) {
  nlohmann::json j;
  j["tours"] = nlohmann::json::array();
  j["per_tour_costs"] = nlohmann::json::array();
  for (const auto& t : s.tours) {
    auto arr = nlohmann::json::array();
    for (const auto& v : t.visits) arr.push_back({{"seg", v.segment}, {"dir", to_string(v.direction)}});
    j["tours"].push_back(std::move(arr));
    j["per_tour_costs"].push_back(t.cost);
  }
  j["cost"] = s.total_cost;
  j["feasible"] = feasible;
  return j;
}

/// Reads tour structure only; costs are recomputed by the evaluator.
inline Solution solution_from_json(const nlohmann::json& j, const Evaluator& eval) {
  std::vector<std::vector<Visit>> tours;
  try {
    for (const auto& t : j.at("tours")) {
      std::vector<Visit> visits;
      for (const auto& v : t) {
        const auto dir = v.at("dir").get<std::string>();
        if (dir != "AB" && dir != "BA") throw std::invalid_argument("direction must be AB or BA");
        visits.push_back({v.at("seg").get<int>(), dir == "AB" ? Direction::AB : Direction::BA});
      }
      tours.push_back(std::move(visits));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed solution JSON: ") + e.what());
  }
  const std::size_t ns = eval.segment_count();
  for (const auto& t : tours) {
    for (const auto& v : t) {
      if (v.segment < 1 || static_cast<std::size_t>(v.segment) > ns) {
        throw std::invalid_argument("solution references segment " + std::to_string(v.segment) +
                                    " not in instance");
      }
    }
  }
  return eval.make_solution(std::move(tours));
}

}  // namespace mstsp
