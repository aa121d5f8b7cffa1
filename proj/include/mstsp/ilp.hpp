#pragma once

// Integer linear program for the multi-tour set TSP: explicit model object,
// LP-format export, and an auditor that checks assignments row by row.
//
// Variables: x[m][i][j] in {0,1} (tour m uses arc i->j) and integer
// t[m][i] in [0, n-1] (position of vertex i in tour m, 0 if unvisited).
// Subtours are eliminated with Miller-Tucker-Zemlin rows
//   t[m][i] - t[m][j] + n * x[m][i][j] <= n - 1   for segment vertices i != j.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mstsp/geometry.hpp"
#include "mstsp/model.hpp"

namespace mstsp::ilp {

enum class Tag { Start, End, SetIn, SetOut, Flow, Budget, Mtz };

inline constexpr std::array<Tag, 7> kAllTags{Tag::Start, Tag::End,    Tag::SetIn, Tag::SetOut,
                                             Tag::Flow,  Tag::Budget, Tag::Mtz};

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Start: return "start";
    case Tag::End: return "end";
    case Tag::SetIn: return "set_in";
    case Tag::SetOut: return "set_out";
    case Tag::Flow: return "flow";
    case Tag::Budget: return "budget";
    case Tag::Mtz: return "mtz";
  }
  return "?";
}

enum class Sense { LessEq, Equal };

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

struct ConstraintGroup {
  Tag tag;
  std::vector<Row> rows;
};

struct IlpModel {
  std::size_t n_tours = 0;
  std::size_t n = 0;  // vertex count, 2 + 2 n_s
  double c_max = 0.0;
  bool allow_empty_tours = false;
  CostMatrix costs;
  std::vector<double> objective;  // per x variable; 0 where fixed
  std::vector<bool> fixed_zero;   // per x variable
  std::vector<ConstraintGroup> groups;

  std::size_t x_index(std::size_t m, std::size_t i, std::size_t j) const { return (m * n + i) * n + j; }
  std::size_t t_index(std::size_t m, std::size_t i) const { return binary_count() + m * n + i; }
  std::size_t binary_count() const { return n_tours * n * n; }
  std::size_t integer_count() const { return n_tours * n; }
  std::size_t variable_count() const { return binary_count() + integer_count(); }
  bool is_binary(std::size_t var) const { return var < binary_count(); }
  std::int64_t t_upper() const { return static_cast<std::int64_t>(n) - 1; }

  std::string var_name(std::size_t var) const {
    if (is_binary(var)) {
      const std::size_t j = var % n, i = (var / n) % n, m = var / (n * n);
      return "x_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j);
    }
    const std::size_t k = var - binary_count();
    return "t_" + std::to_string(k / n) + "_" + std::to_string(k % n);
  }

  const ConstraintGroup& group(Tag t) const {
    for (const auto& g : groups) {
      if (g.tag == t) return g;
    }
    throw std::logic_error("missing constraint group");
  }
  std::size_t row_count() const {
    std::size_t c = 0;
    for (const auto& g : groups) c += g.rows.size();
    return c;
  }
};

/// Closed-form row count of each group for n_s segments and n_t tours.
inline std::size_t expected_rows(Tag t, std::size_t n_segments, std::size_t n_tours) {
  const std::size_t n = vertex_count(n_segments);
  switch (t) {
    case Tag::Start:
    case Tag::End:
    case Tag::Budget: return n_tours;
    case Tag::SetIn:
    case Tag::SetOut: return n_segments;
    case Tag::Flow: return n_tours * (n - 2);
    case Tag::Mtz: return n_tours * (n - 2) * (n - 3);
  }
  return 0;
}

/// Builds the model. With `allow_empty_tours` the direct depot arc 0->1 is
/// usable at zero cost and counts toward the start/end rows, so a tour may
/// stay unused; otherwise it is fixed to zero.
inline IlpModel build_model(const CostMatrix& costs, double c_max, std::size_t n_tours, bool allow_empty_tours = false) {
  if (n_tours < 1) throw std::invalid_argument("build_model: n_t must be >= 1");
  IlpModel md;
  md.n_tours = n_tours;
  md.n = costs.size();
  md.c_max = c_max;
  md.allow_empty_tours = allow_empty_tours;
  md.costs = costs;
  const std::size_t n = md.n;
  const std::size_t ns = costs.segment_count();

  md.objective.assign(md.binary_count(), 0.0);
  md.fixed_zero.assign(md.binary_count(), true);
  auto arc_cost = [&](std::size_t i, std::size_t j) -> std::optional<double> {
    if (i == 0 && j == 1) return allow_empty_tours ? std::optional<double>(0.0) : std::nullopt;
    if (!costs.usable(i, j)) return std::nullopt;
    return costs(i, j);
  };
  for (std::size_t m = 0; m < n_tours; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (auto c = arc_cost(i, j)) {
          md.objective[md.x_index(m, i, j)] = *c;
          md.fixed_zero[md.x_index(m, i, j)] = false;
        }
      }
    }
  }
  auto add = [&](Row& row, std::size_t var, double coef) {
    if (md.is_binary(var) && md.fixed_zero[var]) return;
    row.terms.push_back({var, coef});
  };
  auto group = [&](Tag t) -> ConstraintGroup& {
    md.groups.push_back({t, {}});
    return md.groups.back();
  };

  auto& start = group(Tag::Start);
  for (std::size_t m = 0; m < n_tours; ++m) {
    Row r{"start_" + std::to_string(m), {}, Sense::Equal, 1.0};
    if (allow_empty_tours) add(r, md.x_index(m, 0, 1), 1.0);
    for (std::size_t i = 2; i < n; ++i) add(r, md.x_index(m, 0, i), 1.0);
    start.rows.push_back(std::move(r));
  }
  auto& end = group(Tag::End);
  for (std::size_t m = 0; m < n_tours; ++m) {
    Row r{"end_" + std::to_string(m), {}, Sense::Equal, 1.0};
    if (allow_empty_tours) add(r, md.x_index(m, 0, 1), 1.0);
    for (std::size_t i = 2; i < n; ++i) add(r, md.x_index(m, i, 1), 1.0);
    end.rows.push_back(std::move(r));
  }
  auto& set_in = group(Tag::SetIn);
  for (std::size_t s = 1; s <= ns; ++s) {
    Row r{"set_in_" + std::to_string(s), {}, Sense::Equal, 1.0};
    for (std::size_t m = 0; m < n_tours; ++m) {
      for (std::size_t j = 0; j < n; ++j) {
        add(r, md.x_index(m, j, 2 * s), 1.0);
        add(r, md.x_index(m, j, 2 * s + 1), 1.0);
      }
    }
    set_in.rows.push_back(std::move(r));
  }
  auto& set_out = group(Tag::SetOut);
  for (std::size_t s = 1; s <= ns; ++s) {
    Row r{"set_out_" + std::to_string(s), {}, Sense::Equal, 1.0};
    for (std::size_t m = 0; m < n_tours; ++m) {
      for (std::size_t j = 0; j < n; ++j) {
        add(r, md.x_index(m, 2 * s, j), 1.0);
        add(r, md.x_index(m, 2 * s + 1, j), 1.0);
      }
    }
    set_out.rows.push_back(std::move(r));
  }
  auto& flow = group(Tag::Flow);
  for (std::size_t m = 0; m < n_tours; ++m) {
    for (std::size_t j = 2; j < n; ++j) {
      Row r{"flow_" + std::to_string(m) + "_" + std::to_string(j), {}, Sense::Equal, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        add(r, md.x_index(m, i, j), 1.0);
        add(r, md.x_index(m, j, i), -1.0);
      }
      flow.rows.push_back(std::move(r));
    }
  }
  auto& budget = group(Tag::Budget);
  for (std::size_t m = 0; m < n_tours; ++m) {
    Row r{"budget_" + std::to_string(m), {}, Sense::LessEq, c_max};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t v = md.x_index(m, i, j);
        if (!md.fixed_zero[v] && md.objective[v] != 0.0) r.terms.push_back({v, md.objective[v]});
      }
    }
    budget.rows.push_back(std::move(r));
  }
  auto& mtz = group(Tag::Mtz);
  const double big = static_cast<double>(n);
  for (std::size_t m = 0; m < n_tours; ++m) {
    for (std::size_t i = 2; i < n; ++i) {
      for (std::size_t j = 2; j < n; ++j) {
        if (i == j) continue;
        Row r{"mtz_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j), {}, Sense::LessEq,
              big - 1.0};
        r.terms.push_back({md.t_index(m, i), 1.0});
        r.terms.push_back({md.t_index(m, j), -1.0});
        add(r, md.x_index(m, i, j), big);
        mtz.rows.push_back(std::move(r));
      }
    }
  }
  return md;
}

inline IlpModel build_model(const Instance& inst, const CostMatrix& costs, std::size_t n_tours,
                            bool allow_empty_tours = false) {
  return build_model(costs, inst.c_max, n_tours, allow_empty_tours);
}

// Assignments -----------------------------------------------------------------

struct Assignment {
  std::size_t n_tours = 0;
  std::size_t n = 0;
  std::vector<std::int64_t> x;  // n_t * n * n
  std::vector<std::int64_t> t;  // n_t * n

  Assignment() = default;
  Assignment(std::size_t tours, std::size_t vertices)
      : n_tours(tours), n(vertices), x(tours * vertices * vertices, 0), t(tours * vertices, 0) {}

  std::int64_t& X(std::size_t m, std::size_t i, std::size_t j) { return x[(m * n + i) * n + j]; }
  std::int64_t X(std::size_t m, std::size_t i, std::size_t j) const { return x[(m * n + i) * n + j]; }
  std::int64_t& T(std::size_t m, std::size_t i) { return t[m * n + i]; }
  std::int64_t T(std::size_t m, std::size_t i) const { return t[m * n + i]; }

  double value(const IlpModel& md, std::size_t var) const {
    if (md.is_binary(var)) return static_cast<double>(x[var]);
    return static_cast<double>(t[var - md.binary_count()]);
  }
};

/// Encodes tours as arc indicators and 1-based visit positions. Empty tours
/// (including padding up to n_tours) use the direct depot arc only when
/// `direct_arc_for_empty` is set; otherwise their rows stay all-zero.
inline Assignment encode_solution(const Solution& s, std::size_t n_tours, std::size_t n_segments,
                                  bool direct_arc_for_empty = false) {
  if (s.tours.size() > n_tours) {
    throw std::invalid_argument("encode_solution: solution has " + std::to_string(s.tours.size()) +
                                " tours, model allows " + std::to_string(n_tours));
  }
  Assignment a(n_tours, vertex_count(n_segments));
  for (std::size_t m = 0; m < n_tours; ++m) {
    if (m >= s.tours.size() || s.tours[m].empty()) {
      if (direct_arc_for_empty) a.X(m, 0, 1) = 1;
      continue;
    }
    std::size_t prev = 0;
    std::int64_t pos = 0;
    for (const auto& v : s.tours[m].visits) {
      const std::size_t cur = vertex_of(v, n_segments);
      a.X(m, prev, cur) = 1;
      a.T(m, cur) = ++pos;
      prev = cur;
    }
    a.X(m, prev, 1) = 1;
  }
  return a;
}

/// Follows each tour's arcs from the start depot. nullopt if some tour does
/// not form a single simple path from 0 to 1.
inline std::optional<std::vector<std::vector<Visit>>> decode_tours(const Assignment& a) {
  std::vector<std::vector<Visit>> tours;
  for (std::size_t m = 0; m < a.n_tours; ++m) {
    std::vector<Visit> tour;
    std::size_t cur = 0;
    std::vector<bool> seen(a.n, false);
    for (std::size_t steps = 0;; ++steps) {
      if (steps > a.n) return std::nullopt;
      std::optional<std::size_t> next;
      for (std::size_t j = 0; j < a.n; ++j) {
        if (a.X(m, cur, j) == 0) continue;
        if (next) return std::nullopt;
        next = j;
      }
      if (!next) {
        if (cur == 0) break;  // unused tour
        return std::nullopt;
      }
      if (*next == 1) break;
      if (*next == 0 || seen[*next]) return std::nullopt;
      seen[*next] = true;
      auto [seg, dir] = segment_of(*next);
      tour.push_back({seg, dir});
      cur = *next;
    }
    tours.push_back(std::move(tour));
  }
  return tours;
}

/// Objective: sum of arc costs over all used arcs.
inline double objective_value(const IlpModel& md, const Assignment& a) {
  double v = 0.0;
  for (std::size_t k = 0; k < md.binary_count(); ++k) {
    if (a.x[k] != 0 && !md.fixed_zero[k]) v += md.objective[k] * static_cast<double>(a.x[k]);
  }
  return v;
}

// Verification ---------------------------------------------------------------

struct RowViolation {
  enum class Kind { Row, Bound, Consistency };
  Kind kind = Kind::Row;
  std::optional<Tag> tag;
  std::string name;
  double activity = 0.0;
  double rhs = 0.0;
  double excess = 0.0;  // how far the row is from being satisfied

  std::string describe() const {
    std::ostringstream os;
    os << name << ": activity " << activity << " vs rhs " << rhs << " (excess " << excess << ")";
    return os.str();
  }
};

inline constexpr double kRowTol = 1e-6;

/// Lists every violated row and bound. When all rows hold, also decodes the
/// tours and cross-checks them against the solution-level feasibility check;
/// disagreement is reported as a consistency violation.
inline std::vector<RowViolation> verify(const IlpModel& md, const Assignment& a) {
  if (a.n_tours != md.n_tours || a.n != md.n || a.x.size() != md.binary_count() || a.t.size() != md.integer_count()) {
    throw std::invalid_argument("verify: assignment dimensions do not match the model");
  }
  std::vector<RowViolation> out;
  for (std::size_t k = 0; k < md.binary_count(); ++k) {
    const auto v = a.x[k];
    if ((v != 0 && v != 1) || (md.fixed_zero[k] && v != 0)) {
      out.push_back({RowViolation::Kind::Bound, std::nullopt, md.var_name(k), static_cast<double>(v),
                     md.fixed_zero[k] ? 0.0 : 1.0, 1.0});
    }
  }
  for (std::size_t k = 0; k < md.integer_count(); ++k) {
    const auto v = a.t[k];
    if (v < 0 || v > md.t_upper()) {
      out.push_back({RowViolation::Kind::Bound, std::nullopt, md.var_name(md.binary_count() + k),
                     static_cast<double>(v), static_cast<double>(md.t_upper()),
                     v < 0 ? static_cast<double>(-v) : static_cast<double>(v - md.t_upper())});
    }
  }
  for (const auto& g : md.groups) {
    for (const auto& r : g.rows) {
      double act = 0.0;
      for (const auto& term : r.terms) act += term.coef * a.value(md, term.var);
      const double tol = kRowTol * std::max(1.0, std::abs(r.rhs));
      const double excess = r.sense == Sense::Equal ? std::abs(act - r.rhs) : act - r.rhs;
      if (excess > tol) out.push_back({RowViolation::Kind::Row, g.tag, r.name, act, r.rhs, excess});
    }
  }
  if (!out.empty()) return out;

  auto tours = decode_tours(a);
  if (!tours) {
    out.push_back({RowViolation::Kind::Consistency, std::nullopt, "decode", 0, 0, 1});
    return out;
  }
  const Evaluator eval(md.costs, md.c_max);
  const Solution s = eval.make_solution(std::move(*tours));
  const auto report = check_feasible(s, md.costs, md.c_max);
  if (!report.feasible()) {
    out.push_back({RowViolation::Kind::Consistency, std::nullopt,
                   "solution check: " + report.violations.front().describe(), 0, 0, 1});
  }
  return out;
}

inline std::size_t count_violations(const std::vector<RowViolation>& vs, Tag t) {
  std::size_t c = 0;
  for (const auto& v : vs) c += (v.tag && *v.tag == t) ? 1 : 0;
  return c;
}

// LP export ----------------------------------------------------------------

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_terms(std::ostream& os, const IlpModel& md, const std::vector<Term>& terms) {
  constexpr std::size_t kPerLine = 6;
  if (terms.empty()) {
    os << " 0 " << md.var_name(0);
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0 && k % kPerLine == 0) os << "\n   ";
    const double c = terms[k].coef;
    os << (c < 0 ? " - " : (k == 0 ? " " : " + ")) << num(std::abs(c)) << ' ' << md.var_name(terms[k].var);
  }
}

}  // namespace detail

/// Writes the model in CPLEX LP text format. Output is a pure function of
/// the model, so repeated exports are byte-identical.
inline void export_lp(const IlpModel& md, std::ostream& os) {
  os << "\\ multi-tour set TSP: n_t=" << md.n_tours << " n=" << md.n << " c_max=" << detail::num(md.c_max)
     << (md.allow_empty_tours ? " allow_empty_tours" : "") << "\n";
  os << "Minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t k = 0; k < md.binary_count(); ++k) {
    if (!md.fixed_zero[k]) obj.push_back({k, md.objective[k]});
  }
  detail::write_terms(os, md, obj);
  os << "\nSubject To\n";
  for (const auto& g : md.groups) {
    for (const auto& r : g.rows) {
      os << ' ' << r.name << ':';
      detail::write_terms(os, md, r.terms);
      os << (r.sense == Sense::Equal ? " = " : " <= ") << detail::num(r.rhs) << '\n';
    }
  }
  os << "Bounds\n";
  for (std::size_t k = 0; k < md.binary_count(); ++k) {
    if (md.fixed_zero[k]) os << ' ' << md.var_name(k) << " = 0\n";
  }
  for (std::size_t k = 0; k < md.integer_count(); ++k) {
    os << " 0 <= " << md.var_name(md.binary_count() + k) << " <= " << md.t_upper() << '\n';
  }
  os << "Binaries\n";
  for (std::size_t k = 0; k < md.binary_count(); ++k) os << ' ' << md.var_name(k) << '\n';
  os << "Generals\n";
  for (std::size_t k = 0; k < md.integer_count(); ++k) os << ' ' << md.var_name(md.binary_count() + k) << '\n';
  os << "End\n";
  if (!os) throw std::runtime_error("export_lp: write failed");
}

inline std::string export_lp(const IlpModel& md) {
  std::ostringstream os;
  export_lp(md, os);
  return os.str();
}

/// `<instance>_nt<k>.lp`
inline std::string lp_file_name(const std::string& instance_stem, std::size_t n_tours) {
  return instance_stem + "_nt" + std::to_string(n_tours) + ".lp";
}

}  // namespace mstsp::ilp
