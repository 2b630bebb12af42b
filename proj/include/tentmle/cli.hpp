#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tentmle/duality.hpp"
#include "tentmle/experiments.hpp"
#include "tentmle/hfunc.hpp"
#include "tentmle/io.hpp"
#include "tentmle/quadrature.hpp"
#include "tentmle/rng.hpp"
#include "tentmle/solver.hpp"
#include "tentmle/svg.hpp"
#include "tentmle/triangulations.hpp"

namespace tentmle::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kNotConverged = 3, kTooLarge = 4 };

struct Options {
  std::string input;
  std::string out;
  std::string svg;
  std::string csv;
  std::uint64_t seed = 0;
  double grad_tol = 1e-8;
  int max_iters = 10000;
  int trials = 1000;
  std::string dist = "gaussian";
  std::string kind = "stratum";
  std::vector<double> u;
  int dim = 2;
  int points = 0;
  double ratio = 2.0;
  double split = 0.0;
  double alpha = 0.5;
  bool normalize = false;
  int rank_trials = 0;
};

inline io::Json options_json(const std::string& command, const Options& o) {
  return io::Json{{"command", command},   {"input", o.input},     {"out", o.out},
                  {"svg", o.svg},         {"csv", o.csv},         {"seed", o.seed},
                  {"grad_tol", o.grad_tol}, {"max_iters", o.max_iters}, {"trials", o.trials},
                  {"dist", o.dist},       {"kind", o.kind},       {"u", o.u},
                  {"dim", o.dim},         {"points", o.points},   {"ratio", o.ratio},
                  {"split", o.split},     {"alpha", o.alpha},     {"normalize", o.normalize},
                  {"rank_trials", o.rank_trials}};
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Writes a result to --out (or the stream) and, with --out, its run manifest.
class Emitter {
 public:
  Emitter(std::string command, const Options& opts, std::ostream& out)
      : command_(std::move(command)), opts_(opts), out_(out), start_(std::chrono::steady_clock::now()) {}

  void write(const std::string& text) {
    if (opts_.out.empty()) {
      out_ << text;
      return;
    }
    io::write_file(opts_.out, text);
    io::Json inputs = io::Json::object();
    if (!opts_.input.empty()) inputs[opts_.input] = hex64(rng::fnv1a(io::read_file(opts_.input)));
    io::Json outputs = io::Json::object();
    outputs[opts_.out] = hex64(rng::fnv1a(text));
    for (const auto& extra : extras_) outputs[extra] = hex64(rng::fnv1a(io::read_file(extra)));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const io::Json manifest{{"tool_version", kVersion},
                            {"subcommand", command_},
                            {"options", options_json(command_, opts_)},
                            {"seed", opts_.seed},
                            {"input_digests", inputs},
                            {"output_digests", outputs},
                            {"wall_clock_seconds", wall}};
    io::write_file(opts_.out + ".manifest.json", manifest.dump(2) + "\n");
  }

  void write_json(const io::Json& j) { write(j.dump(2) + "\n"); }

  /// Side output (SVG, CSV) recorded in the manifest.
  void write_extra(const std::string& path, const std::string& text) {
    io::write_file(path, text);
    extras_.push_back(path);
  }

 private:
  std::string command_;
  const Options& opts_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> extras_;
};

inline io::Problem load_problem(const Options& o) {
  if (o.input.empty()) throw InvalidConfiguration("--input is required");
  return io::problem_from(io::read_json_file(o.input));
}

inline solver::SolverOptions solver_options(const Options& o) {
  solver::SolverOptions s;
  s.grad_tol = o.grad_tol;
  s.max_iters = o.max_iters;
  s.seed = o.seed;
  return s;
}

inline int cmd_solve(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  const WeightVector w = p.weights ? WeightVector(*p.weights) : WeightVector::unit(p.config.size());
  const auto r = solver::solve_mle(p.config, w, solver_options(o));
  Emitter e("solve", o, out);
  if (!o.svg.empty()) e.write_extra(o.svg, svg::subdivision_figure(p.config, r.subdivision, r.heights));
  e.write_json(io::to_json(r));
  return r.converged ? kOk : kNotConverged;
}

inline int cmd_mass(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  if (!p.heights) throw InvalidConfiguration("\"heights\" is required");
  Emitter("mass", o, out).write_json(io::to_json(quadrature::total_mass(p.config, *p.heights)));
  return kOk;
}

inline int cmd_h_eval(const Options& o, std::ostream& out) {
  if (o.u.empty()) throw InvalidConfiguration("--u needs at least one value");
  const hfunc::Args u(o.u.begin(), o.u.end());
  const io::Json j{{"u", o.u}, {"value", hfunc::h_eval(u)}, {"branch", hfunc::branch_name(hfunc::h_eval_branch(u))}};
  Emitter("h-eval", o, out).write_json(j);
  return kOk;
}

inline int cmd_weights(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  if (!p.heights) throw InvalidConfiguration("\"heights\" is required");
  Eigen::VectorXd y = *p.heights;
  if (o.normalize) y = quadrature::normalize_heights(p.config, y);
  Triangulation t;
  if (p.subdivision) {
    t = *p.subdivision;
  } else {
    const auto hull = geometry::lifted_hull(p.config, y);
    t = hull.refinement;
  }
  const Eigen::VectorXd w = duality::weights_from_heights(p.config, y, t);
  Emitter("weights", o, out).write_json(io::Json{{"heights", io::vector_json(y)}, {"cells", io::cells_json(t)}, {"weights", io::vector_json(w)}});
  return kOk;
}

inline int cmd_realize(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  if (!p.subdivision) throw InvalidConfiguration("\"cells\" is required");
  geometry::TriangulationCache cache;
  const auto r = duality::realize_subdivision(p.config, *p.subdivision, o.seed, &cache);
  io::Json j = io::to_json(r);
  if (o.rank_trials > 0) j["rank"] = io::to_json(duality::rank_probe(p.config, *p.subdivision, o.rank_trials, o.seed, &cache));
  Emitter("realize", o, out).write_json(j);
  return kOk;
}

inline int cmd_cone_test(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  if (!p.heights || !p.weights) throw InvalidConfiguration("\"heights\" and \"weights\" are required");
  Eigen::VectorXd y = *p.heights;
  if (o.normalize) y = quadrature::normalize_heights(p.config, y);
  const auto cone = duality::normal_cone_generators(p.config, y);
  io::Json j = io::to_json(cone);
  j["member"] = duality::cone_membership(*p.weights, cone);
  j["residual"] = duality::cone_residual(*p.weights, cone.matrix());
  Emitter("cone-test", o, out).write_json(j);
  return kOk;
}

inline int cmd_secondary(const Options& o, std::ostream& out) {
  const auto p = load_problem(o);
  io::Json list = io::Json::array();
  for (const auto& t : geometry::enumerate_regular_triangulations(p.config)) {
    list.push_back(io::Json{{"cells", io::cells_json(t)}, {"gkz", io::vector_json(geometry::gkz_vector(p.config, t))}});
  }
  Emitter("secondary", o, out).write_json(io::Json{{"count", list.size()}, {"triangulations", list}});
  return kOk;
}

inline PointConfiguration default_hexagon() {
  return PointConfiguration::from_rows({{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}});
}

inline int cmd_experiment(const Options& o, std::ostream& out) {
  Emitter e("experiment", o, out);
  if (o.kind == "stratum") {
    const PointConfiguration c = o.input.empty() ? default_hexagon() : load_problem(o).config;
    std::vector<experiments::TrialRecord> records;
    const auto rep = experiments::stratum_frequency_experiment(c, o.trials, o.seed, &records);
    if (!o.csv.empty()) e.write_extra(o.csv, io::trial_csv(records));
    e.write_json(io::to_json(rep));
    return kOk;
  }
  if (o.kind == "table1") {
    const auto rep = experiments::table1_experiment(experiments::Distribution::parse(o.dist), o.trials, o.seed,
                                                    o.points > 0 ? o.points : 6);
    if (!o.csv.empty()) e.write_extra(o.csv, io::trial_csv(rep.records));
    io::Json j = io::to_json(rep);
    j["single_hexagon_share"] = rep.single_polygon_share(6);
    e.write_json(j);
    return kOk;
  }
  if (o.kind == "dplus2") {
    const auto rep = experiments::d_plus_2_check(o.dim, o.trials, o.seed, o.points);
    io::Json ce = io::Json::array();
    for (const auto& m : rep.counterexamples) ce.push_back(io::matrix_json(m));
    e.write_json(io::Json{{"d", rep.d},
                          {"n", rep.n},
                          {"trials", rep.trials},
                          {"trivial", rep.trivial},
                          {"nontrivial", rep.nontrivial},
                          {"not_converged", rep.not_converged},
                          {"counterexamples", ce},
                          {"passed", rep.passed()}});
    return rep.passed() ? kOk : kFailure;
  }
  if (o.kind == "dplus3") {
    const auto c = experiments::d_plus_3_construction(o.dim, o.ratio, o.split);
    const auto r = solver::solve_mle(c.config, c.weights, solver_options(o));
    io::Json j = io::to_json(io::Problem{c.config, c.weights.values(), std::nullopt, std::nullopt});
    j["result"] = io::to_json(r);
    j["expected_cells"] = c.expected ? io::cells_json(*c.expected) : io::Json(nullptr);
    j["matches_expected"] = c.expected ? io::Json(r.subdivision == *c.expected) : io::Json(nullptr);
    j["threshold"] = (o.dim + 1.0) / o.dim;
    e.write_json(j);
    return r.converged ? kOk : kNotConverged;
  }
  if (o.kind == "alpha") {
    const auto rep = experiments::alpha_heights_check(o.dim, o.alpha);
    e.write_json(io::Json{{"d", rep.d},
                          {"alpha", rep.alpha},
                          {"ratio", rep.ratio},
                          {"threshold", rep.threshold},
                          {"gap", rep.gap},
                          {"spread", rep.spread},
                          {"cells", io::cells_json(rep.subdivision)},
                          {"passed", rep.passed()}});
    return rep.passed() ? kOk : kFailure;
  }
  throw InvalidConfiguration("unknown --kind '" + o.kind + "' (stratum, table1, dplus2, dplus3, alpha)");
}

/// Runs the CLI and returns its exit code; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Log-concave density MLE on point configurations (indices in files are 1-based)", "tentmle"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto input = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--input", o.input, "JSON file with points and optional weights, heights, cells");
    if (required) opt->required();
  };
  auto output = [&](CLI::App* s) { s->add_option("--out", o.out, "output file (default stdout); a manifest is written beside it"); };
  auto solver_flags = [&](CLI::App* s) {
    s->add_option("--grad-tol", o.grad_tol, "optimality tolerance")->capture_default_str();
    s->add_option("--max-iters", o.max_iters, "iteration cap")->capture_default_str();
  };
  auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "random seed")->capture_default_str(); };

  auto* solve = app.add_subcommand("solve", "maximum likelihood heights and subdivision");
  input(solve, true);
  output(solve);
  solver_flags(solve);
  seed(solve);
  solve->add_option("--svg", o.svg, "write a figure (d = 1 or 2)");

  auto* mass = app.add_subcommand("mass", "integral of exp(tent) for given heights");
  input(mass, true);
  output(mass);

  auto* heval = app.add_subcommand("h-eval", "evaluate H at the given arguments");
  heval->add_option("--u", o.u, "arguments of H")->required();
  output(heval);

  auto* weights = app.add_subcommand("weights", "weights making the given heights optimal");
  input(weights, true);
  output(weights);
  weights->add_flag("--normalize", o.normalize, "rescale heights to unit mass first");

  auto* realize = app.add_subcommand("realize", "weights whose optimal subdivision is the given one");
  input(realize, true);
  output(realize);
  seed(realize);
  realize->add_option("--rank-trials", o.rank_trials, "also probe the generator rank at this many heights");

  auto* cone = app.add_subcommand("cone-test", "normal cone generators and membership of the given weights");
  input(cone, true);
  output(cone);
  cone->add_flag("--normalize", o.normalize, "rescale heights to unit mass first");

  auto* secondary = app.add_subcommand("secondary", "regular triangulations with GKZ vectors");
  input(secondary, true);
  output(secondary);

  auto* experiment = app.add_subcommand("experiment", "seeded sampling experiments");
  input(experiment, false);
  output(experiment);
  seed(experiment);
  solver_flags(experiment);
  experiment->add_option("--kind", o.kind, "stratum, table1, dplus2, dplus3 or alpha")->capture_default_str();
  experiment->add_option("--trials", o.trials, "number of trials")->capture_default_str();
  experiment->add_option("--dist", o.dist, "gaussian or circular:a")->capture_default_str();
  experiment->add_option("--csv", o.csv, "per-trial CSV output");
  experiment->add_option("--dim", o.dim, "dimension for dplus2, dplus3, alpha")->capture_default_str();
  experiment->add_option("--points", o.points, "points per sample (dplus2, table1)");
  experiment->add_option("--ratio", o.ratio, "weight ratio for dplus3")->capture_default_str();
  experiment->add_option("--split", o.split, "split distance for dplus3 (0 = no split)")->capture_default_str();
  experiment->add_option("--alpha", o.alpha, "height gap for alpha")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*mass) return cmd_mass(o, out);
    if (*heval) return cmd_h_eval(o, out);
    if (*weights) return cmd_weights(o, out);
    if (*realize) return cmd_realize(o, out);
    if (*cone) return cmd_cone_test(o, out);
    if (*secondary) return cmd_secondary(o, out);
    if (*experiment) return cmd_experiment(o, out);
  } catch (const TooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kTooLarge;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const RealizationFailed& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const io::Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kFailure;
}

}  // namespace tentmle::cli
