#pragma once

// Instance JSON:
//   { "depot": [x,y(,z)], "depot_end": [x,y(,z)]?,
//     "pylons":   [{"id":int,"pos":[x,y(,z)]}...],
//     "segments": [{"id":int,"a":int,"b":int}...],
//     "limits":   {"v_max":f,"v_insp":f,"a_max":f},
//     "c_max": f, "d_max": f? }
// All values in SI units.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mstsp/geometry.hpp"

namespace mstsp {

using json = nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Point point_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) {
    throw std::invalid_argument(std::string(what) + ": expected [x,y] or [x,y,z]");
  }
  Point p{j[0].get<double>(), j[1].get<double>(), 0.0};
  if (j.size() == 3) p.z = j[2].get<double>();
  return p;
}

inline json point_to_json(const Point& p) {
  if (p.z == 0.0) return json::array({p.x, p.y});
  return json::array({p.x, p.y, p.z});
}

}  // namespace detail

/// Parses without the coverability check (see load_instance for that).
inline Instance instance_from_json(const json& j) {
  Instance inst;
  try {
    inst.depot_start = detail::point_from_json(j.at("depot"), "depot");
    inst.depot_end = j.contains("depot_end") ? detail::point_from_json(j.at("depot_end"), "depot_end")
                                             : inst.depot_start;
    for (const auto& p : j.at("pylons")) {
      inst.pylons.push_back({p.at("id").get<int>(), detail::point_from_json(p.at("pos"), "pylon pos")});
    }
    for (const auto& s : j.at("segments")) {
      inst.segments.push_back({s.at("id").get<int>(), s.at("a").get<int>(), s.at("b").get<int>()});
    }
    const auto& l = j.at("limits");
    inst.limits = {l.at("v_max").get<double>(), l.at("v_insp").get<double>(), l.at("a_max").get<double>()};
    inst.c_max = j.at("c_max").get<double>();
    if (j.contains("d_max") && !j.at("d_max").is_null()) inst.d_max = j.at("d_max").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
  std::sort(inst.segments.begin(), inst.segments.end(),
            [](const Segment& x, const Segment& y) { return x.id < y.id; });
  validate_structure(inst);
  return inst;
}

inline json instance_to_json(const Instance& inst) {
  json j;
  j["depot"] = detail::point_to_json(inst.depot_start);
  if (!(inst.depot_end == inst.depot_start)) j["depot_end"] = detail::point_to_json(inst.depot_end);
  j["pylons"] = json::array();
  for (const auto& p : inst.pylons) {
    j["pylons"].push_back({{"id", p.id}, {"pos", detail::point_to_json(p.position)}});
  }
  j["segments"] = json::array();
  for (const auto& s : inst.segments) j["segments"].push_back({{"id", s.id}, {"a", s.a}, {"b", s.b}});
  j["limits"] = {{"v_max", inst.limits.v_max}, {"v_insp", inst.limits.v_insp}, {"a_max", inst.limits.a_max}};
  j["c_max"] = inst.c_max;
  if (inst.d_max) j["d_max"] = *inst.d_max;
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

/// Loads, validates structure, and rejects instances with an uncoverable segment.
inline Instance load_instance(const std::string& path) {
  Instance inst = instance_from_json(read_json_file(path));
  validate_coverable(inst, build_cost_matrix(inst));
  return inst;
}

}  // namespace mstsp
