#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mstsp/grasp.hpp"

namespace mstsp {

/// Overlays keys present in `j` onto `cfg`. Recognized keys: rcl, w0, p1,
/// p2, reset, tabu, neighborhood, stop, trials, k_c, seed, jobs.
inline void apply_config_json(GraspConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("GRASP config must be a JSON object");
  static const char* known[] = {"rcl", "w0", "p1", "p2", "reset", "tabu", "neighborhood", "stop", "trials", "k_c", "seed", "jobs"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw std::invalid_argument("unknown GRASP config key '" + key + "'");
    }
  }
  try {
    if (j.contains("rcl")) cfg.rcl_fraction = j["rcl"].get<double>();
    if (j.contains("w0")) cfg.w0 = j["w0"].get<double>();
    if (j.contains("p1")) cfg.p1 = j["p1"].get<double>();
    if (j.contains("p2")) cfg.p2 = j["p2"].get<double>();
    if (j.contains("reset")) cfg.reset_period = j["reset"].get<std::size_t>();
    if (j.contains("tabu")) cfg.tabu_size = j["tabu"].get<std::size_t>();
    if (j.contains("neighborhood")) cfg.neighborhood_size = j["neighborhood"].get<std::size_t>();
    if (j.contains("stop")) cfg.stop_after = j["stop"].get<std::size_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("k_c")) cfg.k_c = j["k_c"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed GRASP config: ") + e.what());
  }
  cfg.validate();
}

inline nlohmann::json config_to_json(const GraspConfig& cfg, std::size_t n_segments) {
  return {{"rcl", cfg.rcl_fraction},
          {"w0", cfg.w0},
          {"p1", cfg.p1},
          {"p2", cfg.p2},
          {"reset", cfg.reset_period},
          {"tabu", cfg.effective_tabu_size(n_segments)},
          {"neighborhood", cfg.effective_neighborhood(n_segments)},
          {"stop", cfg.stop_after},
          {"trials", cfg.trials},
          {"k_c", cfg.k_c},
          {"seed", cfg.seed},
          {"jobs", cfg.jobs}};
}

}  // namespace mstsp
