// Command-line front end: gen, solve, exact, verify, export-ilp, render, bench.
//
// Failures exit nonzero and print one JSON line to stderr:
//   {"error":"<kind>","message":"..."}

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mstsp/config_io.hpp"
#include "mstsp/generate.hpp"
#include "mstsp/geometry.hpp"
#include "mstsp/grasp.hpp"
#include "mstsp/ilp.hpp"
#include "mstsp/instance_io.hpp"
#include "mstsp/model.hpp"
#include "mstsp/oracle.hpp"
#include "mstsp/render.hpp"
#include "mstsp/report.hpp"

namespace {

using nlohmann::json;
using namespace mstsp;

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kBadInput = 3, kInfeasible = 4, kRefused = 5, kIo = 6 };

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << std::endl;
  return code;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

Point parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  if (v.size() < 2 || v.size() > 3) throw std::invalid_argument("point must be x,y or x,y,z");
  return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

struct Context {
  Instance inst;
  CostMatrix matrix;
};

Context load(const std::string& path) {
  Context c{load_instance(path), {}};
  c.matrix = build_cost_matrix(c.inst);
  return c;
}

Solution load_solution(const std::string& path, const Evaluator& eval) {
  return solution_from_json(read_json_file(path), eval);
}

std::string solution_text(const Solution& s, bool feasible) { return solution_to_json(s, feasible).dump(2) + "\n"; }

// gen ------------------------------------------------------------------------

struct GenArgs {
  std::string pylons, lines, depot = "0,0", synthetic, out;
  double d_max = 0.0, c_max = 0.0, span = 150.0;
  bool both_endpoints = false;
  std::size_t segments = 10;
  std::uint64_t seed = 1;
  KinematicLimits limits;
};

int run_gen(const GenArgs& a) {
  Instance inst;
  if (!a.pylons.empty()) {
    if (!(a.d_max > 0.0)) return fail("invalid-argument", "--d-max must be positive", kBadInput);
    if (!(a.c_max > 0.0)) return fail("invalid-argument", "--c-max is required with --pylons", kBadInput);
    std::ifstream pf(a.pylons);
    if (!pf) return fail("io", "cannot open " + a.pylons, kIo);
    LineNetwork net;
    net.pylons = parse_pylon_csv(pf);
    if (!a.lines.empty()) {
      std::ifstream lf(a.lines);
      if (!lf) return fail("io", "cannot open " + a.lines, kIo);
      net.lines = parse_line_csv(lf);
    } else {
      net.lines = chain_lines(net.pylons);
    }
    inst = select_instance(net, parse_point(a.depot), {a.d_max, a.both_endpoints}, a.limits, a.c_max);
  } else {
    SyntheticSpec spec;
    if (a.synthetic == "star" || a.synthetic.empty()) spec.topology = Topology::Star;
    else if (a.synthetic == "line") spec.topology = Topology::Line;
    else if (a.synthetic == "grid") spec.topology = Topology::Grid;
    else return fail("invalid-argument", "unknown topology " + a.synthetic, kBadInput);
    spec.segments = a.segments;
    spec.span = a.span;
    spec.limits = a.limits;
    spec.seed = a.seed;
    if (a.c_max > 0.0) spec.c_max = a.c_max;
    inst = synthetic_instance(spec);
    if (a.d_max > 0.0) inst.d_max = a.d_max;
  }
  validate_coverable(inst, build_cost_matrix(inst));
  emit(instance_to_json(inst).dump(2) + "\n", a.out);
  return kOk;
}

// solve ----------------------------------------------------------------------

struct SolveArgs {
  std::string instance, out, config, reference;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_tours;
  GraspConfig cfg;
  // Flag overrides applied after --config.
  std::optional<double> rcl, w0, p1, p2, k_c;
  std::optional<std::size_t> reset, tabu, neighborhood, stop, trials, jobs;
};

void resolve_config(SolveArgs& a) {
  if (!a.config.empty()) apply_config_json(a.cfg, read_json_file(a.config));
  if (a.rcl) a.cfg.rcl_fraction = *a.rcl;
  if (a.w0) a.cfg.w0 = *a.w0;
  if (a.p1) a.cfg.p1 = *a.p1;
  if (a.p2) a.cfg.p2 = *a.p2;
  if (a.k_c) a.cfg.k_c = *a.k_c;
  if (a.reset) a.cfg.reset_period = *a.reset;
  if (a.tabu) a.cfg.tabu_size = *a.tabu;
  if (a.neighborhood) a.cfg.neighborhood_size = *a.neighborhood;
  if (a.stop) a.cfg.stop_after = *a.stop;
  if (a.trials) a.cfg.trials = *a.trials;
  if (a.jobs) a.cfg.jobs = *a.jobs;
  if (a.seed) {
    a.cfg.seed = *a.seed;
  } else if (a.config.empty() || !read_json_file(a.config).contains("seed")) {
    a.cfg.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
    std::cerr << "seed: " << a.cfg.seed << std::endl;
  }
  a.cfg.validate();
}

std::optional<double> reference_cost(const std::string& path, const Context& c) {
  if (path.empty()) return std::nullopt;
  const Evaluator eval(c.matrix, c.inst.c_max);
  return load_solution(path, eval).total_cost;
}

int run_solve(SolveArgs a) {
  resolve_config(a);
  const Context c = load(a.instance);
  const auto result = solve(c.inst, c.matrix, a.cfg, a.n_tours);
  const auto row = make_bench_row(stem_of(a.instance), c.inst, result, reference_cost(a.reference, c));
  const std::string text = solution_text(result.best, result.feasible);
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
    std::cerr << bench_csv_header() << '\n';
    write_bench_csv(std::cerr, row);
  } else {
    write_text_file(a.out, text);
    std::cout << bench_csv_header() << '\n';
    write_bench_csv(std::cout, row);
  }
  return result.feasible ? kOk : kFailed;
}

// exact ----------------------------------------------------------------------

struct ExactArgs {
  std::string instance, out;
  std::optional<std::size_t> n_tours;
  OracleLimits limits;
};

int run_exact(const ExactArgs& a) {
  const Context c = load(a.instance);
  Solution best;
  if (a.n_tours) {
    auto r = exact_solve(c.inst, c.matrix, *a.n_tours, a.limits);
    if (!r.solution) return fail("infeasible", "no feasible solution with n_t=" + std::to_string(*a.n_tours), kInfeasible);
    best = *r.solution;
  } else {
    best = exact_min_tours(c.inst, c.matrix, a.limits).solution;
  }
  emit(solution_text(best, true), a.out);
  return kOk;
}

// verify ---------------------------------------------------------------------

int run_verify(const std::string& instance, const std::string& solution) {
  const Context c = load(instance);
  const Evaluator eval(c.matrix, c.inst.c_max);
  const Solution s = load_solution(solution, eval);
  const auto report = check_feasible(s, c.matrix, c.inst.c_max);
  json out{{"feasible", report.feasible()}, {"cost", s.total_cost}, {"violations", json::array()}};
  for (const auto& v : report.violations) out["violations"].push_back(v.describe());
  std::cout << out.dump(2) << '\n';
  return report.feasible() ? kOk : kFailed;
}

// export-ilp -----------------------------------------------------------------

int run_export(const std::string& instance, std::size_t n_tours, bool allow_empty, std::string out) {
  const Context c = load(instance);
  const auto model = ilp::build_model(c.inst, c.matrix, n_tours, allow_empty);
  if (out.empty()) out = ilp::lp_file_name(stem_of(instance), n_tours);
  emit(ilp::export_lp(model), out);
  if (out != "-") std::cerr << "wrote " << out << '\n';
  return kOk;
}

// render ---------------------------------------------------------------------

int run_render(const std::string& instance, const std::string& solution, const std::string& svg,
               const std::string& geojson) {
  const Context c = load(instance);
  const Evaluator eval(c.matrix, c.inst.c_max);
  const Solution s = prune_empty_tours(load_solution(solution, eval), eval);
  if (svg.empty() && geojson.empty()) return fail("invalid-argument", "give --svg and/or --geojson", kBadInput);
  if (!svg.empty()) emit(render_svg(c.inst, s), svg);
  if (!geojson.empty()) emit(render_geojson(c.inst, s).dump(2) + "\n", geojson);
  return kOk;
}

// bench ----------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> instances, references;
  bool oracle = false;
  std::string out;
  SolveArgs solve;
};

int run_bench(BenchArgs a) {
  if (!a.references.empty() && a.references.size() != a.instances.size()) {
    return fail("invalid-argument", "--reference must be given once per instance", kBadInput);
  }
  resolve_config(a.solve);
  std::ostringstream csv;
  csv << bench_csv_header() << '\n';
  for (std::size_t k = 0; k < a.instances.size(); ++k) {
    const Context c = load(a.instances[k]);
    const auto result = solve(c.inst, c.matrix, a.solve.cfg, a.solve.n_tours);
    std::optional<double> ref;
    if (!a.references.empty()) ref = reference_cost(a.references[k], c);
    else if (a.oracle) {
      // Compare at the tour count the heuristic settled on; the segment cap still applies.
      OracleLimits lim;
      lim.max_tours = std::max(lim.max_tours, result.report.n_tours);
      ref = exact_solve(c.inst, c.matrix, result.report.n_tours, lim).solution.value().total_cost;
    }
    write_bench_csv(csv, make_bench_row(stem_of(a.instances[k]), c.inst, result, ref));
  }
  emit(csv.str(), a.out);
  return kOk;
}

void add_limit_flags(CLI::App* cmd, KinematicLimits& l) {
  cmd->add_option("--v-max", l.v_max, "transfer speed, m/s")->capture_default_str();
  cmd->add_option("--v-insp", l.v_insp, "inspection speed, m/s")->capture_default_str();
  cmd->add_option("--a-max", l.a_max, "acceleration, m/s^2")->capture_default_str();
}

void add_grasp_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--seed", a.seed, "random seed (printed when omitted)");
  cmd->add_option("--trials", a.trials, "independent trials per tour count (default 30)");
  cmd->add_option("--jobs", a.jobs, "concurrent trials (default 1)");
  cmd->add_option("--nt", a.n_tours, "starting tour count (default: workload bound)");
  cmd->add_option("--rcl", a.rcl, "restricted candidate list fraction (default 0.25)");
  cmd->add_option("--w0", a.w0, "initial move weight (default 5)");
  cmd->add_option("--p1", a.p1, "neighborhood-best prize (default 1)");
  cmd->add_option("--p2", a.p2, "global-best prize (default 5)");
  cmd->add_option("--reset", a.reset, "weight reset period, iterations (default 5)");
  cmd->add_option("--tabu", a.tabu, "tabu list length (default ceil(n_s/4))");
  cmd->add_option("--neighborhood", a.neighborhood, "candidates per iteration (default n_s)");
  cmd->add_option("--stop", a.stop, "non-improving iterations before stopping (default 50)");
  cmd->add_option("--kc", a.k_c, "budget penalty multiplier (default 1000)");
  cmd->add_option("--config", a.config, "GRASP config JSON; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-tour set TSP toolkit for power-line inspection planning"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance from a pylon dataset or synthetically");
  gen_cmd->add_option("--pylons", gen.pylons, "pylon CSV id,x,y[,z]");
  gen_cmd->add_option("--lines", gen.lines, "line CSV a,b (default: consecutive pylons)");
  gen_cmd->add_option("--depot", gen.depot, "depot position x,y")->capture_default_str();
  gen_cmd->add_option("--d-max", gen.d_max, "selection radius, m");
  gen_cmd->add_flag("--both-endpoints", gen.both_endpoints, "require both endpoints within d_max");
  gen_cmd->add_option("--synthetic", gen.synthetic, "star | line | grid (when no --pylons)");
  gen_cmd->add_option("--segments", gen.segments, "synthetic segment count")->capture_default_str();
  gen_cmd->add_option("--span", gen.span, "synthetic pylon spacing, m")->capture_default_str();
  gen_cmd->add_option("--c-max", gen.c_max, "tour budget, s (synthetic default: auto)");
  gen_cmd->add_option("--seed", gen.seed, "synthetic seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "output file (default stdout)");
  add_limit_flags(gen_cmd, gen.limits);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "GRASP solve; Solution JSON plus a bench row");
  solve_cmd->add_option("--instance", solve_args.instance, "instance JSON")->required();
  solve_cmd->add_option("-o,--out", solve_args.out, "solution file (report row then goes to stdout)");
  solve_cmd->add_option("--reference", solve_args.reference, "reference Solution JSON for %PDB/%PDM");
  add_grasp_flags(solve_cmd, solve_args);

  ExactArgs exact;
  auto* exact_cmd = app.add_subcommand("exact", "exhaustive optimum for small instances");
  exact_cmd->add_option("--instance", exact.instance, "instance JSON")->required();
  exact_cmd->add_option("--nt", exact.n_tours, "tour count (default: smallest feasible)");
  exact_cmd->add_option("--max-segments", exact.limits.max_segments, "refuse instances with more segments")->capture_default_str();
  exact_cmd->add_option("--max-tours", exact.limits.max_tours, "refuse tour counts above this")->capture_default_str();
  exact_cmd->add_option("--node-budget", exact.limits.node_budget, "refuse once this many search nodes are expanded")->capture_default_str();
  exact_cmd->add_option("-o,--out", exact.out, "output file (default stdout)");

  std::string v_instance, v_solution;
  auto* verify_cmd = app.add_subcommand("verify", "check a solution against an instance");
  verify_cmd->add_option("--instance", v_instance, "instance JSON")->required();
  verify_cmd->add_option("--solution", v_solution, "Solution JSON")->required();

  std::string e_instance, e_out;
  std::size_t e_nt = 1;
  bool e_allow_empty = false;
  auto* export_cmd = app.add_subcommand("export-ilp", "write the ILP in LP format");
  export_cmd->add_option("--instance", e_instance, "instance JSON")->required();
  export_cmd->add_option("--nt", e_nt, "tour count")->required();
  export_cmd->add_flag("--allow-empty-tours", e_allow_empty, "permit unused tours via a zero-cost depot arc");
  export_cmd->add_option("-o,--out", e_out, "output file (default <instance>_nt<k>.lp, '-' for stdout)");

  std::string r_instance, r_solution, r_svg, r_geojson;
  auto* render_cmd = app.add_subcommand("render", "draw a solution as SVG and/or GeoJSON");
  render_cmd->add_option("--instance", r_instance, "instance JSON")->required();
  render_cmd->add_option("--solution", r_solution, "Solution JSON")->required();
  render_cmd->add_option("--svg", r_svg, "SVG output file");
  render_cmd->add_option("--geojson", r_geojson, "GeoJSON output file");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "solve several instances, CSV summary");
  bench_cmd->add_option("instances", bench.instances, "instance JSON files")->required();
  bench_cmd->add_option("--reference", bench.references, "reference Solution JSON, one per instance");
  bench_cmd->add_flag("--oracle", bench.oracle, "compute references with the exhaustive solver");
  bench_cmd->add_option("-o,--out", bench.out, "CSV output (default stdout)");
  add_grasp_flags(bench_cmd, bench.solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), kUsage);
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve_args);
    if (*exact_cmd) return run_exact(exact);
    if (*verify_cmd) return run_verify(v_instance, v_solution);
    if (*export_cmd) return run_export(e_instance, e_nt, e_allow_empty, e_out);
    if (*render_cmd) return run_render(r_instance, r_solution, r_svg, r_geojson);
    if (*bench_cmd) return run_bench(bench);
  } catch (const InfeasibleInstance& e) {
    return fail("infeasible-instance", e.what(), kInfeasible);
  } catch (const OracleRefusal& e) {
    return fail("oracle-refused", e.what(), kRefused);
  } catch (const IoError& e) {
    return fail("io", e.what(), kIo);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), kBadInput);
  } catch (const std::exception& e) {
    return fail("error", e.what(), kFailed);
  }
  return kUsage;
}
