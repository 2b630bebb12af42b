// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tentmle/tentmle.hpp"

using namespace tentmle;
using hfunc::Args;

namespace {

// Pinned tolerances.
constexpr double kClosedVsSeriesRel = 1e-9;
constexpr double kEvalVsQuadratureAbs = 1e-7;
constexpr double kZeroValueAbs = 1e-14;
constexpr double kSeriesCoefficientAbs = 1e-12;
constexpr double kIdentityRel = 1e-8;
constexpr double kMonteCarloSigmas = 4.0;
constexpr double kConstantSimplexRel = 1e-12;
constexpr double kGradientAbs = 1e-5;
constexpr double kMassAbs = 1e-6;
constexpr double kRoundTripHeights = 1e-4;
constexpr double kGkzRatioRel = 1e-10;
constexpr double kAlphaGap = 1e-4;
constexpr double kTrivialBand = 1.5;
constexpr double kStratumBand = 1.0;
constexpr double kGaussianTrivialBand = 2.0;
constexpr double kCircularHexagonBand = 3.0;
constexpr double kRestartAgreement = 1e-4;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Args random_args(std::mt19937_64& gen, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Args a(static_cast<std::size_t>(d));
  for (auto& v : a) v = u(gen);
  return a;
}

PointConfiguration random_config(std::mt19937_64& gen, int n, int d) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) m(i, k) = normal(gen);
    }
    try {
      return PointConfiguration(m);
    } catch (const InvalidConfiguration&) {
    }
  }
}

Eigen::VectorXd random_vector(std::mt19937_64& gen, int n, double scale) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = scale * normal(gen);
  return y;
}

Eigen::VectorXd random_weights(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> e;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = e(gen) + 0.05;
  return w / w.sum();
}

PointConfiguration hexagon() { return PointConfiguration::from_rows({{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}}); }

PointConfiguration octahedron() {
  return PointConfiguration::from_rows({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
}

/// Low-order Taylor coefficients of t -> f(t) at 0 by least squares on Chebyshev nodes of [-r, r].
std::vector<double> taylor_prefix(const std::function<double(double)>& f, int keep, double r = 0.5, int degree = 14) {
  const int m = 60;
  Eigen::MatrixXd v(m, degree + 1);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double s = std::cos(M_PI * (i + 0.5) / m);
    for (int k = 0; k <= degree; ++k) v(i, k) = std::pow(s, k);
    b(i) = f(r * s);
  }
  const Eigen::VectorXd a = v.colPivHouseholderQr().solve(b);
  std::vector<double> c;
  for (int k = 0; k < keep; ++k) c.push_back(a(k) / std::pow(r, k));
  return c;
}

Outcome c1_h_triple() {
  std::mt19937_64 gen(101);
  double closed_series = 0, eval_quad = 0;
  int separated = 0;
  for (int d = 1; d <= 4; ++d) {
    for (int t = 0; t < 1000; ++t) {
      const Args u = random_args(gen, d, -5, 5);
      if (hfunc::min_gap(u) >= 0.5) {
        const double c = hfunc::h_closed(u), s = hfunc::h_series(u);
        closed_series = std::max(closed_series, std::abs(c - s) / std::abs(s));
        ++separated;
      }
      if (d <= 3) eval_quad = std::max(eval_quad, std::abs(hfunc::h_eval(u) - hfunc::h_quadrature(u)));
    }
  }
  return {closed_series <= kClosedVsSeriesRel && eval_quad <= kEvalVsQuadratureAbs,
          "closed/series rel " + fmt("%.2e", closed_series) + " over " + std::to_string(separated) +
              " separated inputs, eval/quadrature abs " + fmt("%.2e", eval_quad)};
}

Outcome c2_h_reference_values() {
  double zero = 0;
  for (int d = 1; d <= 6; ++d) {
    zero = std::max(zero, std::abs(hfunc::h_eval(Args(static_cast<std::size_t>(d), 0.0)) - 1.0 / factorial(d + 1)));
  }
  const auto one = taylor_prefix([](double t) { return hfunc::h_eval({t}); }, 3);
  const auto two = taylor_prefix([](double t) { return hfunc::h_eval({t, 0.0}); }, 3);
  const double want1[3] = {1.0 / 2, 1.0 / 6, 1.0 / 24};
  const double want2[3] = {1.0 / 6, 1.0 / 24, 1.0 / 120};
  double coef = 0;
  for (int k = 0; k < 3; ++k) {
    coef = std::max(coef, std::abs(one[static_cast<std::size_t>(k)] - want1[k]));
    coef = std::max(coef, std::abs(two[static_cast<std::size_t>(k)] - want2[k]));
  }
  return {zero <= kZeroValueAbs && coef <= kSeriesCoefficientAbs,
          "H(0) error " + fmt("%.2e", zero) + ", series prefix error " + fmt("%.2e", coef)};
}

Outcome c3_h_identity() {
  std::mt19937_64 gen(103);
  double worst_partial = 0, worst_fd = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + t % 4;
    const Args x = random_args(gen, d, -4, 4);
    Args shifted{-x[0]};
    for (int k = 1; k < d; ++k) shifted.push_back(x[static_cast<std::size_t>(k)] - x[0]);
    const double hx = hfunc::h_eval(x);
    const double rhs = std::exp(x[0]) * hfunc::h_eval(shifted) - hx;
    // Five-point stencil, independent of the library's partial derivative.
    const double e = 1e-3;
    auto at = [&](double s) {
      Args y = x;
      y[0] += s;
      return hfunc::h_eval(y);
    };
    const double fd = (-at(2 * e) + 8 * at(e) - 8 * at(-e) + at(-2 * e)) / (12 * e);
    const double scale = std::max(1.0, std::abs(hx));
    worst_partial = std::max(worst_partial, std::abs(x[0] * hfunc::h_partial(x, 0) - rhs) / scale);
    worst_fd = std::max(worst_fd, std::abs(x[0] * fd - rhs) / scale);
  }
  return {worst_partial <= kIdentityRel && worst_fd <= kIdentityRel,
          "residual with analytic partial " + fmt("%.2e", worst_partial) + ", with finite differences " +
              fmt("%.2e", worst_fd)};
}

Outcome c4_simplex_integral() {
  std::mt19937_64 gen(104);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_sigma = 0, worst_const = 0;
  for (int d = 1; d <= 3; ++d) {
    for (int t = 0; t < 100; ++t) {
      const auto c = random_config(gen, d + 1, d);
      Cell s(static_cast<std::size_t>(d + 1));
      for (int i = 0; i <= d; ++i) s[static_cast<std::size_t>(i)] = i;
      const Eigen::VectorXd y = random_vector(gen, d + 1, 1.0);
      const double closed = quadrature::exp_integral_simplex(c, s, std::vector<double>(y.data(), y.data() + d + 1));
      // Uniform points of the simplex: spacings of d sorted uniforms.
      const int samples = 1000000;
      double sum = 0, sum2 = 0;
      std::vector<double> cut(static_cast<std::size_t>(d + 2));
      for (int k = 0; k < samples; ++k) {
        cut[0] = 0.0;
        cut[static_cast<std::size_t>(d + 1)] = 1.0;
        for (int i = 1; i <= d; ++i) cut[static_cast<std::size_t>(i)] = unif(gen);
        std::sort(cut.begin() + 1, cut.begin() + d + 1);
        double h = 0;
        for (int i = 0; i <= d; ++i) h += (cut[static_cast<std::size_t>(i + 1)] - cut[static_cast<std::size_t>(i)]) * y(i);
        const double v = std::exp(h);
        sum += v;
        sum2 += v * v;
      }
      const double vol = geometry::normalized_volume(c, s) / factorial(d);
      const double mean = sum / samples;
      const double se = std::sqrt((sum2 / samples - mean * mean) / samples) * vol;
      worst_sigma = std::max(worst_sigma, std::abs(closed - mean * vol) / se);
      const double cy = y(0);
      const double constant = quadrature::exp_integral_simplex(c, s, std::vector<double>(static_cast<std::size_t>(d + 1), cy));
      worst_const = std::max(worst_const, std::abs(constant - std::exp(cy) * vol) / constant);
    }
  }
  return {worst_sigma <= kMonteCarloSigmas && worst_const <= kConstantSimplexRel,
          "worst Monte Carlo deviation " + fmt("%.2f", worst_sigma) + " SE, constant-height rel " + fmt("%.2e", worst_const)};
}

Outcome c5_gradient() {
  std::mt19937_64 gen(105);
  double worst = 0;
  int checked = 0;
  while (checked < 100) {
    const int d = 1 + checked % 3;
    const int n = std::min(7, d + 2 + checked % 4);
    const auto c = random_config(gen, n, d);
    const Eigen::VectorXd w = random_weights(gen, n);
    const Eigen::VectorXd y = random_vector(gen, n, 1.0);
    const auto hull = geometry::lifted_hull(c, y);
    if (!hull.subdivision.is_triangulation(d)) continue;
    const Eigen::VectorXd g = solver::gradient(c, w, y, hull.refinement);
    for (int k = 0; k < n; ++k) {
      const double e = 1e-6;
      Eigen::VectorXd a = y, b = y;
      a(k) += e;
      b(k) -= e;
      worst = std::max(worst, std::abs(g(k) - (solver::objective(c, w, a) - solver::objective(c, w, b)) / (2 * e)));
    }
    ++checked;
  }
  return {worst <= kGradientAbs, "sup error " + fmt("%.2e", worst) + " over 100 instances"};
}

Outcome c6_six_points() {
  const auto c = PointConfiguration::from_rows({{0, 0}, {100, 0}, {0, 100}, {22, 37}, {43, 22}, {36, 41}});
  const auto r = solver::solve_mle(c, WeightVector::unit(6));
  const double mass = quadrature::total_mass(c, r.heights).total_mass;
  const bool ok = r.converged && r.subdivision.size() == 7 && r.subdivision.is_triangulation(2) &&
                  r.subdivision.used_points().size() == 6 && std::abs(mass - 1) <= kMassAbs;
  return {ok, std::to_string(r.subdivision.size()) + " cells {" + r.subdivision.to_string() + "}, mass " + fmt("%.12f", mass)};
}

Outcome c7_five_points() {
  const auto c = PointConfiguration::from_rows({{0, 0}, {40, 0}, {20, 40}, {17, 10}, {21, 15}});
  const auto r = solver::solve_mle(c, WeightVector::unit(5));
  const Subdivision want = Subdivision::from_labels({{1, 2, 4}, {2, 4, 5}, {2, 3, 5}, {1, 3, 4, 5}});
  return {r.converged && r.subdivision == want, "got {" + r.subdivision.to_string() + "}"};
}

Outcome c8_round_trip() {
  std::mt19937_64 gen(108);
  int agree = 0, done = 0;
  double worst = 0;
  while (done < 50) {
    const int d = 1 + done % 3;
    const int n = d + 2 + done % (8 - d - 1);
    const auto c = random_config(gen, n, d);
    // Concave quadratic plus noise: every point on the tent, generic lift.
    Eigen::VectorXd y = -c.points().rowwise().squaredNorm() + random_vector(gen, n, 0.05);
    if (!geometry::is_relevant(c, y)) continue;
    const auto hull = geometry::lifted_hull(c, y);
    if (!hull.subdivision.is_triangulation(d)) continue;
    y = quadrature::normalize_heights(c, y);
    const WeightVector w(duality::weights_from_heights(c, y, hull.subdivision), true);
    const auto r = solver::solve_mle(c, w);
    const double err = (r.heights - y).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, err);
    agree += r.converged && err <= kRoundTripHeights && r.subdivision == hull.subdivision ? 1 : 0;
    ++done;
  }
  return {agree == 50, std::to_string(agree) + "/50 recovered, worst height error " + fmt("%.2e", worst)};
}

Outcome c9_gkz_ratio() {
  double worst = 0;
  int gens = 0;
  for (const auto& c : {hexagon(), octahedron()}) {
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(c.size(), quadrature::uniform_height(c));
    const auto cone = duality::normal_cone_generators(c, y);
    const double ratio = std::exp(y(0)) / factorial(c.dimension() + 1);
    for (const auto& [t, w] : cone.generators) {
      const Eigen::VectorXd z = geometry::gkz_vector(c, t);
      for (int k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(w(k) / z(k) / ratio - 1));
      ++gens;
    }
  }
  return {worst <= kGkzRatioRel && gens == 17, std::to_string(gens) + " generators, ratio spread " + fmt("%.2e", worst)};
}

Outcome c10_realize_hexagon() {
  const auto c = hexagon();
  geometry::TriangulationCache cache;
  const auto faces = geometry::enumerate_regular_subdivisions(c, &cache);
  int ok = 0, triangulations = 0;
  for (const auto& s : faces) {
    try {
      const auto real = duality::realize_subdivision(c, s, 1, &cache);
      if (solver::solve_mle(c, real.weights).subdivision == s) {
        ++ok;
        triangulations += s.is_triangulation(2) ? 1 : 0;
      }
    } catch (const Error&) {
    }
  }
  return {faces.size() == 45 && ok == 45 && triangulations == 14,
          std::to_string(ok) + "/" + std::to_string(faces.size()) + " faces realized, " + std::to_string(triangulations) +
              " triangulations"};
}

Outcome c11_d_plus_2() {
  const auto d2 = experiments::d_plus_2_check(2, 200, 1102);
  const auto d3 = experiments::d_plus_2_check(3, 200, 1103);
  const auto d1 = experiments::d_plus_2_check(1, 200, 1101, 4);
  const int bad = d2.nontrivial + d3.nontrivial + d1.nontrivial;
  const int unconverged = d2.not_converged + d3.not_converged + d1.not_converged;
  return {bad == 0 && unconverged == 0 && d2.trivial == 200 && d3.trivial == 200 && d1.trivial == 200,
          "trivial " + std::to_string(d2.trivial) + "/200 (d=2), " + std::to_string(d3.trivial) + "/200 (d=3), " +
              std::to_string(d1.trivial) + "/200 (d=1, n=4)"};
}

Outcome c12_threshold() {
  const auto star = experiments::star_triangulation(2);
  const auto above = experiments::d_plus_3_construction(2, 2.0);
  const auto below = experiments::d_plus_3_construction(2, 1.1);
  const auto ra = solver::solve_mle(above.config, above.weights);
  const auto rb = solver::solve_mle(below.config, below.weights);
  const auto a2 = experiments::alpha_heights_check(2, 0.5);
  const auto a3 = experiments::alpha_heights_check(3, 1.0);
  const bool ok = ra.subdivision == star && !(rb.subdivision == star) && a2.passed(kAlphaGap) && a3.passed(kAlphaGap);
  return {ok, "ratio 2 {" + ra.subdivision.to_string() + "}, ratio 1.1 {" + rb.subdivision.to_string() + "}, gap errors " +
                  fmt("%.1e", std::abs(a2.gap - 0.5)) + " / " + fmt("%.1e", std::abs(a3.gap - 1.0))};
}

Outcome c13_hexagon_frequencies() {
  const auto c = hexagon();
  std::set<std::string> faces;
  for (const auto& s : geometry::enumerate_regular_subdivisions(c)) faces.insert(experiments::subdivision_key(c, s));
  const auto rep = experiments::stratum_frequency_experiment(c, 20000, 20240501);
  bool ok = std::abs(rep.percentage("∅") - 30.5) <= kTrivialBand;
  std::string detail = "∅ " + fmt("%.2f", rep.percentage("∅"));
  const std::vector<std::pair<std::string, double>> row{{"35", 5.95}, {"46", 5.85}, {"24", 5.84},
                                                        {"15", 5.83}, {"13", 5.75}, {"26", 5.70}};
  for (const auto& [key, want] : row) {
    const double got = rep.percentage(key);
    ok = ok && std::abs(got - want) <= kStratumBand;
    detail += ", " + key + " " + fmt("%.2f", got);
  }
  int outside = 0;
  for (const auto& e : rep.entries) outside += faces.count(e.key) ? 0 : 1;
  ok = ok && outside == 0;
  detail += "; " + std::to_string(rep.entries.size()) + " strata seen, " + std::to_string(outside) + " outside the 45 faces, " +
            std::to_string(rep.discarded) + " discarded";
  return {ok, detail};
}

Outcome c14_table1() {
  const auto g = experiments::table1_experiment(experiments::Distribution::parse("gaussian"), 2000, 14001);
  const auto k = experiments::table1_experiment(experiments::Distribution::parse("circular:0.1"), 2000, 14002);
  const double trivial = g.trivial_share(), hex = k.single_polygon_share(6);
  const bool ok = std::abs(trivial - 97.3) <= kGaussianTrivialBand && std::abs(hex - 49.6) <= kCircularHexagonBand &&
                  g.mean_cell_count() > k.mean_cell_count();
  return {ok, "gaussian trivial " + fmt("%.2f", trivial) + "%, circular(0.1) one 6-gon " + fmt("%.2f", hex) +
                  "%, mean cells " + fmt("%.4f", g.mean_cell_count()) + " vs " + fmt("%.4f", k.mean_cell_count()) +
                  ", discarded " + std::to_string(g.discarded + k.discarded)};
}

Outcome c15_enumeration() {
  const auto h = geometry::enumerate_regular_triangulations(hexagon()).size();
  const auto o = geometry::enumerate_regular_triangulations(octahedron()).size();
  const auto s = geometry::enumerate_regular_triangulations(PointConfiguration::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}})).size();
  return {h == 14 && o == 3 && s == 2,
          "hexagon " + std::to_string(h) + ", octahedron " + std::to_string(o) + ", square " + std::to_string(s)};
}

Outcome c16_uniqueness() {
  std::mt19937_64 gen(116);
  double worst = 0;
  bool all_converged = true;
  for (int inst = 0; inst < 20; ++inst) {
    const int d = 1 + inst % 3;
    const int n = d + 3 + inst % 3;
    const auto c = random_config(gen, n, d);
    const WeightVector w(random_weights(gen, n), true);
    std::vector<Eigen::VectorXd> sols;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      solver::SolverOptions o;
      o.seed = seed;
      o.start_jitter = 1.0;
      const auto r = solver::solve_mle(c, w, o);
      all_converged = all_converged && r.converged;
      sols.push_back(r.heights);
    }
    for (std::size_t a = 0; a < sols.size(); ++a) {
      for (std::size_t b = a + 1; b < sols.size(); ++b) worst = std::max(worst, (sols[a] - sols[b]).lpNorm<Eigen::Infinity>());
    }
  }
  return {all_converged && worst <= kRestartAgreement, "worst pairwise height gap " + fmt("%.2e", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"H triple consistency", c1_h_triple},
      {"H reference values", c2_h_reference_values},
      {"H differential identity", c3_h_identity},
      {"simplex integral vs Monte Carlo", c4_simplex_integral},
      {"gradient vs finite differences", c5_gradient},
      {"six points golden", c6_six_points},
      {"five points golden", c7_five_points},
      {"heights-weights round trip", c8_round_trip},
      {"generator/GKZ ratio at constant heights", c9_gkz_ratio},
      {"hexagon subdivisions realized", c10_realize_hexagon},
      {"d+2 points give trivial subdivision", c11_d_plus_2},
      {"weight ratio threshold and height gaps", c12_threshold},
      {"hexagon stratum frequencies", c13_hexagon_frequencies},
      {"random planar samples table", c14_table1},
      {"regular triangulation counts", c15_enumeration},
      {"solver uniqueness under restarts", c16_uniqueness},
  };
  // Optional arguments select criteria by number.
  std::set<std::size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(static_cast<std::size_t>(std::atoi(argv[a])));
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
