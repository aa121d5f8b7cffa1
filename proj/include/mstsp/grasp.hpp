#pragma once

// GRASP for the multi-tour set TSP: randomized greedy insertion (GRP)
// followed by an adaptive tabu search over four moves chosen by a weighted
// roulette wheel, driven over independent seeded trials with tour-count
// escalation.

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "mstsp/geometry.hpp"
#include "mstsp/model.hpp"

namespace mstsp {

using Rng = std::mt19937_64;

struct GraspConfig {
  double rcl_fraction = 0.25;
  std::optional<std::size_t> neighborhood_size;  // default n_s
  std::size_t stop_after = 50;                   // non-improving iterations
  std::size_t trials = 30;
  double k_c = 1000.0;
  std::uint64_t seed = 0;
  double w0 = 5.0;
  double p1 = 1.0;
  double p2 = 5.0;
  std::size_t reset_period = 5;
  std::optional<std::size_t> tabu_size;  // default ceil(n_s / 4), at least 1
  std::size_t jobs = 1;

  void validate() const {
    if (!(rcl_fraction > 0.0 && rcl_fraction <= 1.0)) throw std::invalid_argument("rcl_fraction must be in (0, 1]");
    if (neighborhood_size && *neighborhood_size < 1) throw std::invalid_argument("neighborhood_size must be >= 1");
    if (stop_after < 1) throw std::invalid_argument("stop_after must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(k_c > 0.0)) throw std::invalid_argument("k_c must be positive");
    if (!(w0 > 0.0) || p1 < 0.0 || p2 < 0.0) throw std::invalid_argument("weights must be w0 > 0, p1, p2 >= 0");
    if (reset_period < 1) throw std::invalid_argument("reset_period must be >= 1");
    if (tabu_size && *tabu_size < 1) throw std::invalid_argument("tabu_size must be >= 1");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  }

  std::size_t effective_neighborhood(std::size_t n_segments) const {
    return neighborhood_size.value_or(std::max<std::size_t>(1, n_segments));
  }
  std::size_t effective_tabu_size(std::size_t n_segments) const {
    return tabu_size.value_or(std::max<std::size_t>(1, (n_segments + 3) / 4));
  }
};

/// Independent stream per (seed, tour count, trial).
inline Rng trial_rng(std::uint64_t seed, std::size_t n_tours, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n_tours), static_cast<std::uint32_t>(trial)};
  return Rng(seq);
}

// Construction ---------------------------------------------------------------

struct Insertion {
  int segment = 0;
  std::size_t tour = 0;
  std::size_t position = 0;
  Direction direction = Direction::AB;
  double resulting_cost = 0.0;  // c_con of the receiving tour after insertion
};

namespace detail {

/// Vertex at position p of the depot-framed sequence; p == -1 is the start
/// depot and p == size the terminal depot.
inline std::size_t framed_vertex(const std::vector<Visit>& visits, std::ptrdiff_t p, const Evaluator& eval) {
  if (p < 0) return 0;
  if (static_cast<std::size_t>(p) >= visits.size()) return 1;
  return eval.vertex(visits[static_cast<std::size_t>(p)]);
}

/// c(T) after inserting vertex y before position q.
inline double cost_after_insert(const Tour& t, std::size_t q, std::size_t y, const Evaluator& eval) {
  const std::size_t a = framed_vertex(t.visits, static_cast<std::ptrdiff_t>(q) - 1, eval);
  const std::size_t b = framed_vertex(t.visits, static_cast<std::ptrdiff_t>(q), eval);
  return t.cost - eval.arc(a, b) + eval.arc(a, y) + eval.arc(y, b);
}

/// c(T) after removing the visit at position p.
inline double cost_after_remove(const Tour& t, std::size_t p, const Evaluator& eval) {
  const auto pp = static_cast<std::ptrdiff_t>(p);
  const std::size_t a = framed_vertex(t.visits, pp - 1, eval);
  const std::size_t x = framed_vertex(t.visits, pp, eval);
  const std::size_t b = framed_vertex(t.visits, pp + 1, eval);
  return t.cost - eval.arc(a, x) - eval.arc(x, b) + eval.arc(a, b);
}

/// c(T) after replacing the visit at position p by vertex y.
inline double cost_after_replace(const Tour& t, std::size_t p, std::size_t y, const Evaluator& eval) {
  const auto pp = static_cast<std::ptrdiff_t>(p);
  const std::size_t a = framed_vertex(t.visits, pp - 1, eval);
  const std::size_t x = framed_vertex(t.visits, pp, eval);
  const std::size_t b = framed_vertex(t.visits, pp + 1, eval);
  return t.cost - eval.arc(a, x) - eval.arc(x, b) + eval.arc(a, y) + eval.arc(y, b);
}

/// c(T) after placing vertex u at position i and w at position j (i < j).
inline double cost_after_pair_replace(const Tour& t, std::size_t i, std::size_t j, std::size_t u, std::size_t w,
                                      const Evaluator& eval) {
  const auto pi = static_cast<std::ptrdiff_t>(i);
  const auto pj = static_cast<std::ptrdiff_t>(j);
  const std::size_t a = framed_vertex(t.visits, pi - 1, eval);
  const std::size_t xi = framed_vertex(t.visits, pi, eval);
  const std::size_t xj = framed_vertex(t.visits, pj, eval);
  const std::size_t b = framed_vertex(t.visits, pj + 1, eval);
  if (j == i + 1) {
    return t.cost - eval.arc(a, xi) - eval.arc(xi, xj) - eval.arc(xj, b) + eval.arc(a, u) + eval.arc(u, w) +
           eval.arc(w, b);
  }
  const std::size_t bi = framed_vertex(t.visits, pi + 1, eval);
  const std::size_t aj = framed_vertex(t.visits, pj - 1, eval);
  return t.cost - eval.arc(a, xi) - eval.arc(xi, bi) - eval.arc(aj, xj) - eval.arc(xj, b) + eval.arc(a, u) +
         eval.arc(u, bi) + eval.arc(aj, w) + eval.arc(w, b);
}

inline void finish(Solution& s, const Evaluator& eval, std::initializer_list<std::size_t> touched) {
  for (auto k : touched) eval.refresh(s.tours[k]);
  eval.resum(s);
  assert(covers_all(s, eval.segment_count()));
}

}  // namespace detail

/// Every insertion of every segment in `available` into every tour, slot
/// and direction, enumerated in (segment, tour, position, AB-first) order.
inline std::vector<Insertion> propose_insertions(const Solution& s, const std::vector<int>& available,
                                                 const Evaluator& eval) {
  std::vector<Insertion> out;
  for (int seg : available) {
    for (std::size_t m = 0; m < s.tours.size(); ++m) {
      const Tour& t = s.tours[m];
      for (std::size_t q = 0; q <= t.visits.size(); ++q) {
        for (Direction d : {Direction::AB, Direction::BA}) {
          const double c = detail::cost_after_insert(t, q, eval.vertex({seg, d}), eval);
          out.push_back({seg, m, q, d, eval.penalize(c)});
        }
      }
    }
  }
  return out;
}

/// Randomized greedy construction. Each step ranks all proposed insertions
/// by the penalized cost of the receiving tour and applies one drawn
/// uniformly from the cheapest ceil(rcl_fraction * |proposed|).
inline Solution grp_construct(const Evaluator& eval, std::size_t n_tours, const GraspConfig& cfg, Rng& rng) {
  if (n_tours < 1) throw std::invalid_argument("grp_construct: need at least one tour");
  Solution s;
  s.tours.resize(n_tours);
  eval.refresh(s);

  std::vector<int> available(eval.segment_count());
  for (std::size_t k = 0; k < available.size(); ++k) available[k] = static_cast<int>(k + 1);

  std::vector<std::size_t> order;
  while (!available.empty()) {
    const auto proposed = propose_insertions(s, available, eval);
    order.resize(proposed.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;

    const auto rcl = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.rcl_fraction * static_cast<double>(proposed.size()) - 1e-12)));
    auto by_cost = [&](std::size_t x, std::size_t y) {
      if (proposed[x].resulting_cost != proposed[y].resulting_cost) {
        return proposed[x].resulting_cost < proposed[y].resulting_cost;
      }
      return x < y;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rcl), order.end(), by_cost);
    std::uniform_int_distribution<std::size_t> pick(0, rcl - 1);
    const Insertion& ins = proposed[order[pick(rng)]];

    Tour& t = s.tours[ins.tour];
    t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(ins.position), Visit{ins.segment, ins.direction});
    eval.refresh(t);
    std::erase(available, ins.segment);
  }
  eval.resum(s);
  return s;
}

// Moves ----------------------------------------------------------------------

enum class Move : int { RandomShift = 1, BestShift = 2, BestSwap = 3, BestDirectionSwitch = 4 };

struct VisitRef {
  std::size_t tour = 0;
  std::size_t position = 0;
};

inline VisitRef random_visit(const Solution& s, Rng& rng) {
  const std::size_t total = s.visit_count();
  if (total == 0) throw std::logic_error("random_visit on an empty solution");
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  for (std::size_t m = 0; m < s.tours.size(); ++m) {
    if (k < s.tours[m].visits.size()) return {m, k};
    k -= s.tours[m].visits.size();
  }
  throw std::logic_error("random_visit: index out of range");
}

namespace detail {

struct ShiftPlan {
  Solution reduced;  // solution with the moved visit removed
  Visit moved;
  VisitRef origin;
};

inline ShiftPlan remove_visit(const Solution& s, VisitRef at, const Evaluator& eval) {
  ShiftPlan plan{s, s.tours[at.tour].visits[at.position], at};
  Tour& t = plan.reduced.tours[at.tour];
  t.cost = cost_after_remove(t, at.position, eval);
  t.penalized = eval.penalize(t.cost);
  t.visits.erase(t.visits.begin() + static_cast<std::ptrdiff_t>(at.position));
  return plan;
}

inline double penalized_total_after_insert(const ShiftPlan& plan, std::size_t m, std::size_t q, Direction d,
                                           const Evaluator& eval) {
  const Tour& t = plan.reduced.tours[m];
  const double c = cost_after_insert(t, q, eval.vertex({plan.moved.segment, d}), eval);
  return plan.reduced.total_penalized_cost - t.penalized + eval.penalize(c);
}

inline Solution apply_insert(ShiftPlan plan, std::size_t m, std::size_t q, Direction d, const Evaluator& eval) {
  Tour& t = plan.reduced.tours[m];
  t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(q), Visit{plan.moved.segment, d});
  finish(plan.reduced, eval, {plan.origin.tour, m});
  return std::move(plan.reduced);
}

inline void resum_penalized(Solution& s) {
  s.total_penalized_cost = 0.0;
  for (const auto& t : s.tours) s.total_penalized_cost += t.penalized;
}

}  // namespace detail

/// Move 1: reinsert the visit at a uniformly random slot other than its own,
/// keeping the cheaper of the two directions there. nullopt if no other slot.
inline std::optional<Solution> random_shift_of(const Solution& s, VisitRef at, const Evaluator& eval, Rng& rng) {
  auto plan = detail::remove_visit(s, at, eval);
  detail::resum_penalized(plan.reduced);
  std::size_t slots = 0;
  for (const auto& t : plan.reduced.tours) slots += t.visits.size() + 1;
  if (slots <= 1) return std::nullopt;

  // Walk slots in (tour, position) order, skipping the origin slot.
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, slots - 2)(rng);
  std::size_t m = 0, q = 0;
  for (;; ++m) {
    const std::size_t len = plan.reduced.tours[m].visits.size() + 1;
    const std::size_t skip = (m == at.tour && at.position < len) ? 1 : 0;
    if (k < len - skip) {
      q = (skip && k >= at.position) ? k + 1 : k;
      break;
    }
    k -= len - skip;
  }
  const double ab = detail::penalized_total_after_insert(plan, m, q, Direction::AB, eval);
  const double ba = detail::penalized_total_after_insert(plan, m, q, Direction::BA, eval);
  const Direction d = (ba < ab - kCostEps) ? Direction::BA : Direction::AB;
  return detail::apply_insert(std::move(plan), m, q, d, eval);
}

/// Move 2: reinsert the visit at the penalized-cost-minimizing slot and
/// direction, excluding the identity placement. Ties go to the lowest
/// (tour, position, AB-first).
inline std::optional<Solution> best_shift_of(const Solution& s, VisitRef at, const Evaluator& eval) {
  auto plan = detail::remove_visit(s, at, eval);
  detail::resum_penalized(plan.reduced);
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::tuple<std::size_t, std::size_t, Direction>> choice;
  for (std::size_t m = 0; m < plan.reduced.tours.size(); ++m) {
    for (std::size_t q = 0; q <= plan.reduced.tours[m].visits.size(); ++q) {
      for (Direction d : {Direction::AB, Direction::BA}) {
        if (m == at.tour && q == at.position && d == plan.moved.direction) continue;
        const double v = detail::penalized_total_after_insert(plan, m, q, d, eval);
        if (!choice || v < best - kCostEps) {
          best = v;
          choice = {m, q, d};
        }
      }
    }
  }
  if (!choice) return std::nullopt;
  auto [m, q, d] = *choice;
  return detail::apply_insert(std::move(plan), m, q, d, eval);
}

/// Move 3: swap the visit with the partner (and direction pair) minimizing
/// the penalized total. nullopt when there is no other visit.
inline std::optional<Solution> best_swap_of(const Solution& s, VisitRef at, const Evaluator& eval) {
  const Visit x = s.tours[at.tour].visits[at.position];
  double best = std::numeric_limits<double>::infinity();
  struct Choice {
    VisitRef other;
    Direction x_dir, y_dir;
  };
  std::optional<Choice> choice;

  for (std::size_t m = 0; m < s.tours.size(); ++m) {
    const Tour& t2 = s.tours[m];
    for (std::size_t p = 0; p < t2.visits.size(); ++p) {
      if (m == at.tour && p == at.position) continue;
      const Visit y = t2.visits[p];
      for (Direction yd : {Direction::AB, Direction::BA}) {
        for (Direction xd : {Direction::AB, Direction::BA}) {
          const std::size_t vy = eval.vertex({y.segment, yd});  // goes to x's slot
          const std::size_t vx = eval.vertex({x.segment, xd});  // goes to y's slot
          double total;
          if (m != at.tour) {
            const Tour& t1 = s.tours[at.tour];
            const double c1 = detail::cost_after_replace(t1, at.position, vy, eval);
            const double c2 = detail::cost_after_replace(t2, p, vx, eval);
            total = s.total_penalized_cost - t1.penalized - t2.penalized + eval.penalize(c1) + eval.penalize(c2);
          } else {
            const bool x_first = at.position < p;
            const std::size_t i = x_first ? at.position : p;
            const std::size_t j = x_first ? p : at.position;
            const double c = x_first ? detail::cost_after_pair_replace(t2, i, j, vy, vx, eval)
                                     : detail::cost_after_pair_replace(t2, i, j, vx, vy, eval);
            total = s.total_penalized_cost - t2.penalized + eval.penalize(c);
          }
          if (!choice || total < best - kCostEps) {
            best = total;
            choice = Choice{{m, p}, xd, yd};
          }
        }
      }
    }
  }
  if (!choice) return std::nullopt;
  Solution out = s;
  const Visit y = s.tours[choice->other.tour].visits[choice->other.position];
  out.tours[at.tour].visits[at.position] = Visit{y.segment, choice->y_dir};
  out.tours[choice->other.tour].visits[choice->other.position] = Visit{x.segment, choice->x_dir};
  detail::finish(out, eval, {at.tour, choice->other.tour});
  return out;
}

/// Move 4: flip the single visit whose reversal minimizes the penalized
/// total, even if every flip worsens it.
inline std::optional<Solution> best_direction_switch(const Solution& s, const Evaluator& eval) {
  double best = std::numeric_limits<double>::infinity();
  std::optional<VisitRef> choice;
  for (std::size_t m = 0; m < s.tours.size(); ++m) {
    const Tour& t = s.tours[m];
    for (std::size_t p = 0; p < t.visits.size(); ++p) {
      const Visit v = t.visits[p];
      const double c = detail::cost_after_replace(t, p, eval.vertex({v.segment, flipped(v.direction)}), eval);
      const double total = s.total_penalized_cost - t.penalized + eval.penalize(c);
      if (!choice || total < best - kCostEps) {
        best = total;
        choice = VisitRef{m, p};
      }
    }
  }
  if (!choice) return std::nullopt;
  Solution out = s;
  Visit& v = out.tours[choice->tour].visits[choice->position];
  v.direction = flipped(v.direction);
  detail::finish(out, eval, {choice->tour});
  return out;
}

/// Applies one move to `s`. nullopt means the move has no legal non-identity
/// target here and the caller should select another.
inline std::optional<Solution> apply_move(const Solution& s, Move move, const Evaluator& eval, Rng& rng) {
  if (s.visit_count() == 0) return std::nullopt;
  switch (move) {
    case Move::RandomShift: return random_shift_of(s, random_visit(s, rng), eval, rng);
    case Move::BestShift: return best_shift_of(s, random_visit(s, rng), eval);
    case Move::BestSwap:
      if (s.visit_count() < 2) return std::nullopt;
      return best_swap_of(s, random_visit(s, rng), eval);
    case Move::BestDirectionSwitch: return best_direction_switch(s, eval);
  }
  return std::nullopt;
}

// Adaptive tabu search -------------------------------------------------------

/// Roulette-wheel scores for the four moves.
class MoveWeights {
 public:
  MoveWeights(double w0, double p1, double p2, std::size_t reset_period)
      : w0_(w0), p1_(p1), p2_(p2), reset_period_(reset_period) {
    reset();
  }

  void reset() { w_.fill(w0_); }
  const std::array<double, 4>& values() const { return w_; }
  double& operator[](Move m) { return w_[static_cast<std::size_t>(m) - 1]; }
  double operator[](Move m) const { return w_[static_cast<std::size_t>(m) - 1]; }

  double w0() const { return w0_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }
  std::size_t reset_period() const { return reset_period_; }

  /// Draws a move with probability w_i / sum(w), restricted to `allowed`.
  Move roulette(Rng& rng, std::array<bool, 4> allowed = {true, true, true, true}) const {
    std::array<double, 4> w{};
    for (std::size_t k = 0; k < 4; ++k) w[k] = allowed[k] ? w_[k] : 0.0;
    if (std::all_of(w.begin(), w.end(), [](double x) { return x <= 0.0; })) {
      throw std::logic_error("roulette: no move has positive weight");
    }
    std::discrete_distribution<int> wheel(w.begin(), w.end());
    return static_cast<Move>(wheel(rng) + 1);
  }

 private:
  std::array<double, 4> w_{};
  double w0_, p1_, p2_;
  std::size_t reset_period_;
};

struct SearchState {
  Solution current;
  Solution best;
  std::deque<std::uint64_t> tabu;
  std::size_t tabu_capacity = 1;
  MoveWeights weights;
  std::size_t non_improving = 0;
  std::size_t iteration = 0;

  bool is_tabu(std::uint64_t h) const { return std::find(tabu.begin(), tabu.end(), h) != tabu.end(); }
  void push_tabu(std::uint64_t h) {
    tabu.push_back(h);
    while (tabu.size() > tabu_capacity) tabu.pop_front();
  }
};

class TabuSearch {
 public:
  TabuSearch(const Solution& initial, const Evaluator& eval, const GraspConfig& cfg, Rng& rng)
      : eval_(eval),
        cfg_(cfg),
        rng_(rng),
        state_{initial, initial, {}, cfg.effective_tabu_size(eval.segment_count()),
               MoveWeights(cfg.w0, cfg.p1, cfg.p2, cfg.reset_period), 0, 0} {
    state_.push_tabu(solution_hash(initial));
  }

  const SearchState& state() const { return state_; }
  bool done() const { return state_.non_improving >= cfg_.stop_after || state_.current.visit_count() == 0; }

  /// One iteration: build the neighborhood, move to its best non-tabu member,
  /// update the incumbent and the move weights.
  void step() {
    const std::size_t size = cfg_.effective_neighborhood(eval_.segment_count());
    std::optional<Solution> chosen;
    Move chosen_move = Move::RandomShift;
    bool chosen_tabu = true;
    std::uint64_t chosen_hash = 0;

    for (std::size_t k = 0; k < size; ++k) {
      std::array<bool, 4> allowed{true, true, true, true};
      std::optional<Solution> cand;
      Move mv = Move::RandomShift;
      while (!cand) {
        mv = state_.weights.roulette(rng_, allowed);
        cand = apply_move(state_.current, mv, eval_, rng_);
        if (!cand) allowed[static_cast<std::size_t>(mv) - 1] = false;
        if (!cand && std::none_of(allowed.begin(), allowed.end(), [](bool b) { return b; })) {
          ++state_.non_improving;
          return;
        }
      }
      const std::uint64_t h = solution_hash(*cand);
      const bool tabu = state_.is_tabu(h);
      // Non-tabu candidates always beat tabu ones; among equals, cheaper wins.
      const bool better = !chosen || (chosen_tabu && !tabu) ||
                          (tabu == chosen_tabu && cand->total_penalized_cost < chosen->total_penalized_cost - kCostEps);
      if (better) {
        chosen = std::move(cand);
        chosen_move = mv;
        chosen_tabu = tabu;
        chosen_hash = h;
      }
    }

    ++state_.iteration;
    state_.current = std::move(*chosen);
    state_.push_tabu(chosen_hash);
    state_.weights[chosen_move] += state_.weights.p1();
    if (state_.current.total_penalized_cost < state_.best.total_penalized_cost - kCostEps) {
      state_.best = state_.current;
      state_.weights[chosen_move] += state_.weights.p2();
      state_.non_improving = 0;
    } else {
      ++state_.non_improving;
    }
    state_.weights[Move::RandomShift] += state_.weights.p1();
    if (state_.iteration % state_.weights.reset_period() == 0) state_.weights.reset();
  }

  Solution run() {
    while (!done()) step();
    return state_.best;
  }

 private:
  const Evaluator& eval_;
  const GraspConfig& cfg_;
  Rng& rng_;
  SearchState state_;
};

inline Solution tabu_search(const Solution& initial, const Evaluator& eval, const GraspConfig& cfg, Rng& rng) {
  return TabuSearch(initial, eval, cfg, rng).run();
}

// Trial driver ---------------------------------------------------------------

struct TrialResult {
  Solution solution;  // empty tours pruned
  bool feasible = false;
  double seconds = 0.0;
};

struct SolveReport {
  std::size_t n_tours = 0;                 // tour budget of the final round
  std::vector<std::size_t> attempted;      // tour budgets tried, in order
  std::vector<TrialResult> trials;         // trials of the final round
  std::size_t feasible_trials = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;                  // over feasible trials
  double pdm_vs_best = 0.0;
  double mean_trial_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SolveResult {
  Solution best;  // empty tours pruned
  bool feasible = false;
  SolveReport report;
};

/// Admissible tour-count bound: every segment is entered by at least its
/// cheapest incoming arc, so no fewer tours can carry the total.
inline std::size_t tour_lower_bound(const CostMatrix& m, double c_max) {
  const std::size_t ns = m.segment_count();
  double work = 0.0;
  for (std::size_t id = 1; id <= ns; ++id) {
    double cheapest = std::numeric_limits<double>::infinity();
    for (std::size_t v : {2 * id, 2 * id + 1}) {
      for (std::size_t from = 0; from < m.size(); ++from) cheapest = std::min(cheapest, m(from, v));
    }
    work += cheapest;
  }
  const auto lb = static_cast<std::size_t>(std::ceil(work / c_max - 1e-12));
  return std::clamp<std::size_t>(lb, 1, std::max<std::size_t>(1, ns));
}

/// One GRP + tabu search trial.
inline TrialResult run_trial(const Evaluator& eval, std::size_t n_tours, const GraspConfig& cfg, std::size_t trial) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng = trial_rng(cfg.seed, n_tours, trial);
  Solution initial = grp_construct(eval, n_tours, cfg, rng);
  Solution best = tabu_search(initial, eval, cfg, rng);
  TrialResult r;
  r.solution = prune_empty_tours(std::move(best), eval);
  r.feasible = check_feasible(r.solution, eval.matrix(), eval.c_max()).feasible();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs `trials` trials, fanning out over up to `jobs` threads. Output order
/// is by trial index regardless of scheduling.
inline std::vector<TrialResult> run_trials(const Evaluator& eval, std::size_t n_tours, const GraspConfig& cfg) {
  std::vector<TrialResult> results(cfg.trials);
  const std::size_t workers = std::min(cfg.jobs, cfg.trials);
  if (workers <= 1) {
    for (std::size_t k = 0; k < cfg.trials; ++k) results[k] = run_trial(eval, n_tours, cfg, k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < cfg.trials; k = next++) results[k] = run_trial(eval, n_tours, cfg, k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Solves with tour-count escalation: starting at the hint (or the workload
/// bound), runs all trials per tour count and stops at the first count where
/// any trial is feasible. One visit per tour is the guaranteed fallback.
inline SolveResult solve(const Instance& inst, const CostMatrix& m, const GraspConfig& cfg,
                         std::optional<std::size_t> n_tours_hint = std::nullopt) {
  cfg.validate();
  validate_coverable(inst, m);
  const auto t_start = std::chrono::steady_clock::now();
  const Evaluator eval(m, inst.c_max, PenaltyConfig{cfg.k_c});
  const std::size_t ns = inst.segment_count();
  std::size_t n_tours = n_tours_hint.value_or(tour_lower_bound(m, inst.c_max));
  if (n_tours < 1) throw std::invalid_argument("tour count must be >= 1");
  n_tours = std::min(n_tours, ns);

  SolveResult out;
  for (;; ++n_tours) {
    auto trials = run_trials(eval, n_tours, cfg);
    out.report.attempted.push_back(n_tours);
    const bool any = std::any_of(trials.begin(), trials.end(), [](const TrialResult& r) { return r.feasible; });
    if (any || n_tours >= ns) {
      out.report.n_tours = n_tours;
      out.report.trials = std::move(trials);
      break;
    }
  }

  auto& rep = out.report;
  std::optional<std::size_t> best_idx;
  double sum = 0.0, secs = 0.0;
  for (std::size_t k = 0; k < rep.trials.size(); ++k) {
    const auto& r = rep.trials[k];
    secs += r.seconds;
    if (!r.feasible) continue;
    ++rep.feasible_trials;
    sum += r.solution.total_cost;
    if (!best_idx || r.solution.total_cost < rep.trials[*best_idx].solution.total_cost - kCostEps) best_idx = k;
  }
  rep.mean_trial_seconds = secs / static_cast<double>(rep.trials.size());

  if (best_idx) {
    out.best = rep.trials[*best_idx].solution;
    out.feasible = true;
    rep.best_cost = out.best.total_cost;
    rep.mean_cost = sum / static_cast<double>(rep.feasible_trials);
  } else {
    // Heuristic missed at n_t = n_s: one tour per segment in its cheaper direction.
    std::vector<std::vector<Visit>> tours;
    for (std::size_t id = 1; id <= ns; ++id) {
      const int sid = static_cast<int>(id);
      const double ab = tour_cost({{sid, Direction::AB}}, m);
      const double ba = tour_cost({{sid, Direction::BA}}, m);
      tours.push_back({{sid, ba < ab - kCostEps ? Direction::BA : Direction::AB}});
    }
    out.best = eval.make_solution(std::move(tours));
    out.feasible = check_feasible(out.best, m, inst.c_max).feasible();
    rep.best_cost = rep.mean_cost = out.best.total_cost;
    rep.feasible_trials = 0;
  }
  rep.pdm_vs_best = rep.best_cost > 0.0 ? pdm(rep.mean_cost, rep.best_cost) : 0.0;
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace mstsp
