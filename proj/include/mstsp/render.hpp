#pragma once

// SVG and GeoJSON views of a solution. Coordinates stay in the instance's
// planar frame (metres); GeoJSON consumers must treat them as projected.

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mstsp/geometry.hpp"
#include "mstsp/model.hpp"

namespace mstsp {

inline constexpr std::array<const char*, 10> kTourPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

inline const char* tour_color(std::size_t tour_index) { return kTourPalette[tour_index % kTourPalette.size()]; }

/// Depot, then entry and exit of each visit in order, then the end depot.
inline std::vector<Point> route_polyline(const Instance& inst, const Tour& t) {
  std::vector<Point> pts{inst.depot_start};
  const std::size_t ns = inst.segment_count();
  for (const auto& v : t.visits) {
    const std::size_t vx = vertex_of(v, ns);
    pts.push_back(entry_point(inst, vx));
    pts.push_back(exit_point(inst, vx));
  }
  pts.push_back(inst.depot_end);
  return pts;
}

inline void check_renderable(const Instance& inst, const Solution& s) {
  if (!covers_all(s, inst.segment_count())) {
    throw std::invalid_argument("solution does not cover the instance's segments exactly once");
  }
}

inline nlohmann::json render_geojson(const Instance& inst, const Solution& s) {
  check_renderable(inst, s);
  using nlohmann::json;
  json features = json::array();
  for (const auto& seg : inst.segments) {
    const Point a = inst.pylon(seg.a).position, b = inst.pylon(seg.b).position;
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", "segment"}, {"segment", seg.id}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", {{a.x, a.y}, {b.x, b.y}}}}}});
  }
  std::size_t route = 0;
  for (const auto& t : s.tours) {
    if (t.empty()) continue;
    json coords = json::array();
    for (const auto& p : route_polyline(inst, t)) coords.push_back({p.x, p.y});
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", "route"}, {"tour", route}, {"color", tour_color(route)}, {"cost", t.cost}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}}});
    ++route;
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline std::string render_svg(const Instance& inst, const Solution& s) {
  check_renderable(inst, s);
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](const Point& p) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  };
  grow(inst.depot_start);
  grow(inst.depot_end);
  for (const auto& p : inst.pylons) grow(p.position);

  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  const double margin = 0.05 * span;
  const double size = 800.0;
  const double scale = size / (span + 2 * margin);
  // SVG y grows downward; flip so north is up.
  auto px = [&](const Point& p) { return (p.x - lo_x + margin) * scale; };
  auto py = [&](const Point& p) { return (hi_y - p.y + margin) * scale; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(size) << "\" height=\"" << fmt(size)
     << "\" viewBox=\"0 0 " << fmt(size) << ' ' << fmt(size) << "\">\n";
  os << "<g id=\"segments\" stroke=\"#bbbbbb\" stroke-width=\"6\" stroke-linecap=\"round\">\n";
  for (const auto& seg : inst.segments) {
    const Point a = inst.pylon(seg.a).position, b = inst.pylon(seg.b).position;
    os << "<line class=\"segment\" x1=\"" << fmt(px(a)) << "\" y1=\"" << fmt(py(a)) << "\" x2=\"" << fmt(px(b))
       << "\" y2=\"" << fmt(py(b)) << "\"/>\n";
  }
  os << "</g>\n<g id=\"routes\" fill=\"none\" stroke-width=\"2\">\n";
  std::size_t route = 0;
  for (const auto& t : s.tours) {
    if (t.empty()) continue;
    os << "<polyline class=\"route\" stroke=\"" << tour_color(route) << "\" points=\"";
    bool first = true;
    for (const auto& p : route_polyline(inst, t)) {
      os << (first ? "" : " ") << fmt(px(p)) << ',' << fmt(py(p));
      first = false;
    }
    os << "\"/>\n";
    ++route;
  }
  os << "</g>\n<circle id=\"depot\" cx=\"" << fmt(px(inst.depot_start)) << "\" cy=\"" << fmt(py(inst.depot_start))
     << "\" r=\"6\" fill=\"black\"/>\n</svg>\n";
  return os.str();
}

}  // namespace mstsp
