#pragma once

// Benchmark rows: one line per solved instance, CSV on output.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "mstsp/grasp.hpp"
#include "mstsp/model.hpp"

namespace mstsp {

struct BenchRow {
  std::string instance;
  std::size_t n_segments = 0;
  double c_max = 0.0;
  std::size_t n_tours = 0;  // non-empty tours in the best solution
  double best_cost = 0.0;
  double mean_cost = 0.0;
  std::optional<double> pdb;  // vs reference
  std::optional<double> pdm;  // vs reference
  double mean_trial_seconds = 0.0;
  double total_seconds = 0.0;
};

inline BenchRow make_bench_row(const std::string& instance, const Instance& inst, const SolveResult& r,
                               std::optional<double> reference_cost) {
  BenchRow row;
  row.instance = instance;
  row.n_segments = inst.segment_count();
  row.c_max = inst.c_max;
  row.n_tours = r.best.nonempty_tours();
  row.best_cost = r.report.best_cost;
  row.mean_cost = r.report.mean_cost;
  if (reference_cost) {
    row.pdb = pdb(row.best_cost, *reference_cost);
    row.pdm = pdm(row.mean_cost, *reference_cost);
  }
  row.mean_trial_seconds = r.report.mean_trial_seconds;
  row.total_seconds = r.report.total_seconds;
  return row;
}

inline const char* bench_csv_header() {
  return "instance,n_s,c_max,n_t,best_cost,mean_cost,pdb,pdm,mean_trial_s,total_s";
}

inline void write_bench_csv(std::ostream& os, const BenchRow& r) {
  auto f = [](double v, const char* format) {
    char buf[48];
    std::snprintf(buf, sizeof buf, format, v);
    return std::string(buf);
  };
  os << r.instance << ',' << r.n_segments << ',' << f(r.c_max, "%.3f") << ',' << r.n_tours << ','
     << f(r.best_cost, "%.3f") << ',' << f(r.mean_cost, "%.3f") << ',' << (r.pdb ? f(*r.pdb, "%.2f") : "") << ','
     << (r.pdm ? f(*r.pdm, "%.2f") : "") << ',' << f(r.mean_trial_seconds, "%.4f") << ','
     << f(r.total_seconds, "%.4f") << '\n';
}

}  // namespace mstsp
