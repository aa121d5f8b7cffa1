#pragma once

// Physical instance description and the direction-expanded cost matrix.
//
// Vertex layout: 0 is the start depot, 1 the terminal depot, and segment i
// (1-based) owns vertices 2i (traversed A->B) and 2i+1 (traversed B->A).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mstsp {

/// Thrown when an instance cannot be covered even with one tour per segment.
class InfeasibleInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct KinematicLimits {
  double v_max = 5.0;   // transfer cruise speed, m/s
  double v_insp = 1.0;  // inspection speed, m/s
  double a_max = 2.5;   // m/s^2
};

struct Pylon {
  int id = 0;
  Point position;
};

struct Segment {
  int id = 0;  // 1..n_s
  int a = 0;   // pylon id
  int b = 0;   // pylon id
};

enum class Direction : std::uint8_t { AB = 0, BA = 1 };

inline Direction flipped(Direction d) {
  return d == Direction::AB ? Direction::BA : Direction::AB;
}

inline const char* to_string(Direction d) { return d == Direction::AB ? "AB" : "BA"; }

struct Instance {
  Point depot_start;
  Point depot_end;
  std::vector<Pylon> pylons;
  std::vector<Segment> segments;  // sorted by id, ids 1..n_s
  KinematicLimits limits;
  double c_max = 0.0;
  std::optional<double> d_max;

  std::size_t segment_count() const { return segments.size(); }

  const Pylon& pylon(int id) const {
    for (const auto& p : pylons) {
      if (p.id == id) return p;
    }
    throw std::invalid_argument("unknown pylon id " + std::to_string(id));
  }

  const Segment& segment(int id) const {
    if (id < 1 || static_cast<std::size_t>(id) > segments.size()) {
      throw std::invalid_argument("segment id out of range: " + std::to_string(id));
    }
    return segments[static_cast<std::size_t>(id - 1)];
  }
};

/// Rest-to-rest time over `distance` with a trapezoidal velocity profile
/// (accelerate at `accel`, cruise at `cruise`, decelerate at `accel`).
/// Falls back to the triangular profile when cruise speed is never reached.
inline double travel_time(double distance, double cruise, double accel) {
  if (!std::isfinite(distance) || !std::isfinite(cruise) || !std::isfinite(accel) ||
      distance < 0.0 || cruise <= 0.0 || accel <= 0.0) {
    throw std::invalid_argument("travel_time: distance must be >= 0, speed and accel > 0");
  }
  if (distance >= cruise * cruise / accel) return distance / cruise + cruise / accel;
  return 2.0 * std::sqrt(distance / accel);
}

inline std::size_t vertex_count(std::size_t n_segments) { return 2 + 2 * n_segments; }

inline std::size_t vertex_of(int segment_id, Direction d, std::size_t n_segments) {
  if (segment_id < 1 || static_cast<std::size_t>(segment_id) > n_segments) {
    throw std::invalid_argument("vertex_of: segment id out of range: " + std::to_string(segment_id));
  }
  return 2 * static_cast<std::size_t>(segment_id) + (d == Direction::BA ? 1 : 0);
}

/// Inverse of vertex_of. Depot vertices 0 and 1 are rejected.
inline std::pair<int, Direction> segment_of(std::size_t vertex) {
  if (vertex < 2) throw std::invalid_argument("segment_of: depot vertex has no segment");
  return {static_cast<int>(vertex / 2), (vertex % 2 == 0) ? Direction::AB : Direction::BA};
}

/// Throws std::invalid_argument on structural problems. Coverability is
/// checked separately by validate_coverable, which needs the cost model.
inline void validate_structure(const Instance& inst) {
  const auto& l = inst.limits;
  if (!(l.v_max > 0.0) || !(l.v_insp > 0.0) || !(l.a_max > 0.0)) {
    throw std::invalid_argument("kinematic limits must be strictly positive");
  }
  if (l.v_insp > l.v_max) throw std::invalid_argument("v_insp must not exceed v_max");
  if (!(inst.c_max > 0.0) || !std::isfinite(inst.c_max)) {
    throw std::invalid_argument("c_max must be positive and finite");
  }
  if (inst.d_max && !(*inst.d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
  if (inst.segments.empty()) throw std::invalid_argument("instance has no segments");

  std::unordered_map<int, Point> positions;
  for (const auto& p : inst.pylons) {
    if (!positions.emplace(p.id, p.position).second) {
      throw std::invalid_argument("duplicate pylon id " + std::to_string(p.id));
    }
  }
  for (std::size_t k = 0; k < inst.segments.size(); ++k) {
    const auto& s = inst.segments[k];
    if (s.id != static_cast<int>(k + 1)) {
      throw std::invalid_argument("segment ids must be contiguous from 1 in order");
    }
    auto pa = positions.find(s.a);
    auto pb = positions.find(s.b);
    if (pa == positions.end() || pb == positions.end()) {
      throw std::invalid_argument("segment " + std::to_string(s.id) + " references unknown pylon");
    }
    if (s.a == s.b) throw std::invalid_argument("segment " + std::to_string(s.id) + " is degenerate");
    if (!(distance(pa->second, pb->second) > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(s.id) + " has zero length");
    }
  }
}

/// Dense asymmetric matrix of edge times over the direction-expanded graph.
/// Unusable arcs hold +infinity (never a large finite stand-in).
class CostMatrix {
 public:
  static constexpr double kUnusable = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), costs_(n * n, kUnusable) {}

  std::size_t size() const { return n_; }
  std::size_t segment_count() const { return n_ >= 2 ? (n_ - 2) / 2 : 0; }

  double operator()(std::size_t from, std::size_t to) const { return costs_[from * n_ + to]; }
  double& at(std::size_t from, std::size_t to) { return costs_[from * n_ + to]; }

  bool usable(std::size_t from, std::size_t to) const { return std::isfinite((*this)(from, to)); }

 private:
  std::size_t n_ = 0;
  std::vector<double> costs_;
};

namespace detail {

inline Point pylon_position(const Instance& inst, int pylon_id) { return inst.pylon(pylon_id).position; }

}  // namespace detail

/// Point where a visit of the vertex begins (start depot for 0, end depot for 1).
inline Point entry_point(const Instance& inst, std::size_t vertex) {
  if (vertex == 0) return inst.depot_start;
  if (vertex == 1) return inst.depot_end;
  auto [id, dir] = segment_of(vertex);
  const auto& s = inst.segment(id);
  return detail::pylon_position(inst, dir == Direction::AB ? s.a : s.b);
}

/// Point where a visit of the vertex ends.
inline Point exit_point(const Instance& inst, std::size_t vertex) {
  if (vertex == 0) return inst.depot_start;
  if (vertex == 1) return inst.depot_end;
  auto [id, dir] = segment_of(vertex);
  const auto& s = inst.segment(id);
  return detail::pylon_position(inst, dir == Direction::AB ? s.b : s.a);
}

inline double segment_length(const Instance& inst, int segment_id) {
  const auto& s = inst.segment(segment_id);
  return distance(detail::pylon_position(inst, s.a), detail::pylon_position(inst, s.b));
}

inline double inspection_time(const Instance& inst, int segment_id) {
  return travel_time(segment_length(inst, segment_id), inst.limits.v_insp, inst.limits.a_max);
}

/// Transfer time from the end of `from` to the start of `to`.
inline double approach_time(const Instance& inst, std::size_t from, std::size_t to) {
  return travel_time(distance(exit_point(inst, from), entry_point(inst, to)), inst.limits.v_max,
                     inst.limits.a_max);
}

/// Builds the cost matrix. Arc i->j costs the transfer to j's entry plus the
/// inspection of j; arcs into the terminal depot carry transfer only.
inline CostMatrix build_cost_matrix(const Instance& inst) {
  validate_structure(inst);
  const std::size_t ns = inst.segment_count();
  const std::size_t n = vertex_count(ns);
  CostMatrix m(n);

  std::vector<Point> entry(n), exit(n);
  std::vector<double> inspect(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    entry[v] = entry_point(inst, v);
    exit[v] = exit_point(inst, v);
  }
  for (std::size_t id = 1; id <= ns; ++id) {
    const double t = inspection_time(inst, static_cast<int>(id));
    inspect[2 * id] = t;
    inspect[2 * id + 1] = t;
  }

  const auto& l = inst.limits;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 1) continue;  // nothing leaves the terminal depot
    for (std::size_t j = 1; j < n; ++j) {
      if (i == j) continue;
      if (i >= 2 && j >= 2 && i / 2 == j / 2) continue;  // sibling direction
      const double transfer = travel_time(distance(exit[i], entry[j]), l.v_max, l.a_max);
      m.at(i, j) = transfer + inspect[j];
    }
  }
  return m;
}

/// Cheapest single-segment tour (depot -> segment -> depot) over both directions.
inline double single_segment_tour_cost(const CostMatrix& m, int segment_id) {
  const std::size_t ns = m.segment_count();
  const std::size_t ab = vertex_of(segment_id, Direction::AB, ns);
  const std::size_t ba = vertex_of(segment_id, Direction::BA, ns);
  return std::min(m(0, ab) + m(ab, 1), m(0, ba) + m(ba, 1));
}

/// Rejects instances where some segment does not fit in a tour of its own.
inline void validate_coverable(const Instance& inst, const CostMatrix& m) {
  for (const auto& s : inst.segments) {
    const double c = single_segment_tour_cost(m, s.id);
    if (c > inst.c_max) {
      throw InfeasibleInstance("segment " + std::to_string(s.id) + " needs " + std::to_string(c) +
                               " s alone, above c_max " + std::to_string(inst.c_max));
    }
  }
}

}  // namespace mstsp
