#pragma once

// Instance generation: radius selection from a pylon/line dataset and
// seeded synthetic topologies.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstsp/geometry.hpp"

namespace mstsp {

struct LineNetwork {
  std::vector<Pylon> pylons;
  std::vector<std::pair<int, int>> lines;  // pylon id pairs
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline bool skip_line(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#' || std::isalpha(static_cast<unsigned char>(line[p]));
}

}  // namespace detail

/// Pylons from CSV rows `id,x,y[,z]` (metres). Blank lines, `#` comments and
/// a header row are skipped.
inline std::vector<Pylon> parse_pylon_csv(std::istream& in) {
  std::vector<Pylon> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() < 3 || cells.size() > 4) {
      throw std::invalid_argument("pylon CSV line " + std::to_string(lineno) + ": expected id,x,y[,z]");
    }
    try {
      Pylon p{std::stoi(cells[0]), {std::stod(cells[1]), std::stod(cells[2]), 0.0}};
      if (cells.size() == 4) p.position.z = std::stod(cells[3]);
      out.push_back(p);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("pylon CSV line " + std::to_string(lineno) + ": not numeric");
    }
  }
  return out;
}

/// Line segments from CSV rows `a,b` (pylon ids).
inline std::vector<std::pair<int, int>> parse_line_csv(std::istream& in) {
  std::vector<std::pair<int, int>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 2) throw std::invalid_argument("line CSV line " + std::to_string(lineno) + ": expected a,b");
    try {
      out.emplace_back(std::stoi(cells[0]), std::stoi(cells[1]));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("line CSV line " + std::to_string(lineno) + ": not numeric");
    }
  }
  return out;
}

/// Without an explicit line list, consecutive pylons form one line.
inline std::vector<std::pair<int, int>> chain_lines(const std::vector<Pylon>& pylons) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t k = 1; k < pylons.size(); ++k) out.emplace_back(pylons[k - 1].id, pylons[k].id);
  return out;
}

struct SelectionRule {
  double d_max = 0.0;
  bool both_endpoints = false;  // default: at least one endpoint within d_max
};

/// Keeps lines with one (or both) endpoints within d_max of the depot,
/// renumbering segments 1..n_s in input order and keeping referenced pylons.
inline Instance select_instance(const LineNetwork& net, const Point& depot, const SelectionRule& rule,
                                const KinematicLimits& limits, double c_max) {
  if (!(rule.d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
  std::unordered_map<int, Point> pos;
  for (const auto& p : net.pylons) pos[p.id] = p.position;

  Instance inst;
  inst.depot_start = inst.depot_end = depot;
  inst.limits = limits;
  inst.c_max = c_max;
  inst.d_max = rule.d_max;
  std::set<int> used;
  for (const auto& [a, b] : net.lines) {
    auto pa = pos.find(a), pb = pos.find(b);
    if (pa == pos.end() || pb == pos.end()) {
      throw std::invalid_argument("line " + std::to_string(a) + "-" + std::to_string(b) + " references unknown pylon");
    }
    const bool in_a = distance(pa->second, depot) <= rule.d_max;
    const bool in_b = distance(pb->second, depot) <= rule.d_max;
    if (rule.both_endpoints ? (in_a && in_b) : (in_a || in_b)) {
      inst.segments.push_back({static_cast<int>(inst.segments.size() + 1), a, b});
      used.insert(a);
      used.insert(b);
    }
  }
  if (inst.segments.empty()) {
    throw std::invalid_argument("no segment within d_max=" + std::to_string(rule.d_max) + " m of the depot");
  }
  for (const auto& p : net.pylons) {
    if (used.count(p.id)) inst.pylons.push_back(p);
  }
  return inst;
}

enum class Topology { Star, Line, Grid };

struct SyntheticSpec {
  Topology topology = Topology::Star;
  std::size_t segments = 10;
  double span = 150.0;  // typical pylon spacing, metres
  KinematicLimits limits;
  std::optional<double> c_max;  // default: auto-sized so roughly three tours are needed
  std::uint64_t seed = 1;
};

/// Seeded synthetic network around a depot at the origin. Star: radial lines
/// from a ring of pylons; Line: one jittered chain; Grid: random edges of a
/// jittered lattice.
inline LineNetwork synthetic_network(const SyntheticSpec& spec) {
  if (spec.segments < 1) throw std::invalid_argument("synthetic instance needs at least one segment");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LineNetwork net;
  int next_id = 1;
  auto add = [&](double x, double y) {
    net.pylons.push_back({next_id, {x, y, 0.0}});
    return next_id++;
  };
  const double s = spec.span;

  switch (spec.topology) {
    case Topology::Star: {
      // Arms of chained segments radiating from near the depot.
      const std::size_t arms = std::max<std::size_t>(3, static_cast<std::size_t>(std::sqrt(spec.segments)) + 1);
      std::vector<int> tip(arms);
      std::vector<double> angle(arms), radius(arms, 0.5 * s);
      for (std::size_t k = 0; k < arms; ++k) {
        angle[k] = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.3 * jitter(rng)) / static_cast<double>(arms);
        tip[k] = add(radius[k] * std::cos(angle[k]), radius[k] * std::sin(angle[k]));
      }
      for (std::size_t k = 0; k < spec.segments; ++k) {
        const std::size_t arm = k % arms;
        radius[arm] += s * (1.0 + jitter(rng));
        const double a = angle[arm] + 0.15 * jitter(rng);
        const int id = add(radius[arm] * std::cos(a), radius[arm] * std::sin(a));
        net.lines.emplace_back(tip[arm], id);
        tip[arm] = id;
      }
      break;
    }
    case Topology::Line: {
      double x = 0.3 * s, y = 0.3 * s * (1.0 + jitter(rng));
      int prev = add(x, y);
      double heading = unit(rng) * 2.0 * std::numbers::pi;
      for (std::size_t k = 0; k < spec.segments; ++k) {
        heading += 0.6 * jitter(rng);
        x += s * (1.0 + jitter(rng)) * std::cos(heading);
        y += s * (1.0 + jitter(rng)) * std::sin(heading);
        const int id = add(x, y);
        net.lines.emplace_back(prev, id);
        prev = id;
      }
      break;
    }
    case Topology::Grid: {
      const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.segments)))) + 1;
      std::vector<int> ids;
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
          const double gx = (static_cast<double>(c) - 0.5 * static_cast<double>(side - 1) + jitter(rng)) * s;
          const double gy = (static_cast<double>(r) - 0.5 * static_cast<double>(side - 1) + jitter(rng)) * s;
          ids.push_back(add(gx, gy));
        }
      }
      std::vector<std::pair<int, int>> edges;
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
          if (c + 1 < side) edges.emplace_back(ids[r * side + c], ids[r * side + c + 1]);
          if (r + 1 < side) edges.emplace_back(ids[r * side + c], ids[(r + 1) * side + c]);
        }
      }
      std::shuffle(edges.begin(), edges.end(), rng);
      edges.resize(std::min(edges.size(), spec.segments));
      net.lines = std::move(edges);
      break;
    }
  }
  return net;
}

/// Budget that admits every single-segment tour with margin; sized from a
/// nearest-neighbour single tour so that roughly `target_tours` are needed.
inline double auto_budget(Instance inst, double target_tours) {
  inst.c_max = 1.0;  // placeholder, the cost matrix does not depend on it
  const CostMatrix m = build_cost_matrix(inst);
  const std::size_t ns = inst.segment_count();
  double widest = 0.0;
  for (const auto& s : inst.segments) widest = std::max(widest, single_segment_tour_cost(m, s.id));

  std::vector<bool> done(ns + 1, false);
  std::size_t at = 0;
  double chain = 0.0;
  for (std::size_t step = 0; step < ns; ++step) {
    std::size_t next = 0;
    double best = CostMatrix::kUnusable;
    for (std::size_t v = 2; v < m.size(); ++v) {
      if (!done[segment_of(v).first] && m(at, v) < best) {
        best = m(at, v);
        next = v;
      }
    }
    done[segment_of(next).first] = true;
    chain += best;
    at = next;
  }
  chain += m(at, 1);
  return std::ceil(std::max(1.05 * widest, 1.15 * chain / target_tours));
}

inline Instance synthetic_instance(const SyntheticSpec& spec) {
  const LineNetwork net = synthetic_network(spec);
  Instance inst;
  inst.pylons = net.pylons;
  for (const auto& [a, b] : net.lines) inst.segments.push_back({static_cast<int>(inst.segments.size() + 1), a, b});
  inst.limits = spec.limits;
  inst.c_max = 1.0;
  inst.c_max = spec.c_max.value_or(auto_budget(inst, 3.0));
  return inst;
}

}  // namespace mstsp
