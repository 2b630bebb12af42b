#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/geometry.hpp"
#include "tentmle/hfunc.hpp"
#include "tentmle/rng.hpp"
#include "tentmle/solver.hpp"

namespace tentmle::experiments {

/// Worker count: TENTMLE_THREADS if set, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("TENTMLE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
/// written by index, so the outcome does not depend on scheduling.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Uniform point of the probability simplex via normalized exponential spacings.
inline WeightVector sample_weights_simplex(int n, std::uint64_t seed, std::uint64_t trial) {
  if (n < 1) throw InvalidWeights("need n >= 1");
  rng::Stream s = rng::Stream::substream(seed, trial, "weights");
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e(i) = s.exponential();
  return WeightVector(e, true);
}

struct Distribution {
  enum class Kind { kGaussian, kCircular } kind = Kind::kGaussian;
  double a = 0.5;

  static Distribution parse(const std::string& text) {
    Distribution d;
    if (text == "gaussian") return d;
    const std::string prefix = "circular:";
    if (text.rfind(prefix, 0) == 0) {
      d.kind = Kind::kCircular;
      try {
        d.a = std::stod(text.substr(prefix.size()));
      } catch (const std::exception&) {
        throw InvalidConfiguration("bad circular parameter in '" + text + "'");
      }
      if (!(d.a > 0)) throw InvalidConfiguration("circular parameter must be positive");
      return d;
    }
    throw InvalidConfiguration("unknown distribution '" + text + "' (use gaussian or circular:a)");
  }

  std::string name() const { return kind == Kind::kGaussian ? "gaussian" : "circular:" + format_number(a); }

 private:
  static std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }
};

/// n i.i.d. planar points; throws DegenerateSample if they do not form a configuration.
inline PointConfiguration sample_points(const Distribution& dist, int n, std::uint64_t seed, std::uint64_t trial,
                                        int attempt = 0) {
  rng::Stream s = rng::Stream::substream(seed, trial, "points/" + std::to_string(attempt));
  Eigen::MatrixXd m(n, 2);
  for (int i = 0; i < n; ++i) {
    if (dist.kind == Distribution::Kind::kGaussian) {
      m(i, 0) = s.normal();
      m(i, 1) = s.normal();
    } else {
      const double r = std::pow(s.uniform(), dist.a);
      const double theta = 2.0 * M_PI * s.uniform();
      m(i, 0) = r * std::cos(theta);
      m(i, 1) = r * std::sin(theta);
    }
  }
  try {
    return PointConfiguration(m);
  } catch (const InvalidConfiguration& e) {
    throw DegenerateSample(e.what());
  }
}

/// Gaussian configuration of n points in R^d, retrying substreams until valid.
inline PointConfiguration sample_gaussian_config(int n, int d, std::uint64_t seed, std::uint64_t trial) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    rng::Stream s = rng::Stream::substream(seed, trial, "gaussian-config/" + std::to_string(attempt));
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) m(i, k) = s.normal();
    }
    try {
      return PointConfiguration(m);
    } catch (const InvalidConfiguration&) {
    }
  }
  throw DegenerateSample("no valid configuration after 100 draws");
}

/// Vertex count of the planar convex hull of the given points (collinear points excluded).
inline int hull_vertex_count_2d(const PointConfiguration& config, const Cell& pts) {
  if (config.dimension() != 2) throw DimensionMismatch("polygon shapes need d = 2");
  std::vector<std::pair<double, double>> p;
  for (Index i : pts) p.emplace_back(config.points()(i, 0), config.points()(i, 1));
  std::sort(p.begin(), p.end());
  if (p.size() < 3) return static_cast<int>(p.size());
  const double scale = config.length_scale();
  auto cross = [&](const auto& o, const auto& a, const auto& b) {
    const double v = (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    return std::abs(v) <= 1e-12 * scale * scale ? 0.0 : v;
  };
  std::vector<std::pair<double, double>> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  return static_cast<int>(k - 1);
}

inline Cell all_points(const PointConfiguration& config) {
  Cell c(static_cast<std::size_t>(config.size()));
  std::iota(c.begin(), c.end(), 0);
  return c;
}

/// Key of a subdivision: for planar points in convex position the sorted list of
/// diagonals ("13 14 15", "∅" when flat), otherwise the cell list.
inline std::string subdivision_key(const PointConfiguration& config, const Subdivision& s) {
  if (config.dimension() != 2 || hull_vertex_count_2d(config, all_points(config)) != config.size()) {
    return s.to_string();
  }
  std::vector<std::pair<int, int>> diagonals;
  for (const auto& wall : geometry::interior_walls(config, s)) {
    diagonals.emplace_back(wall.shared.front() + 1, wall.shared.back() + 1);
  }
  if (diagonals.empty()) return "∅";
  std::sort(diagonals.begin(), diagonals.end());
  const bool wide = config.size() >= 10;
  std::string key;
  for (const auto& [a, b] : diagonals) {
    if (!key.empty()) key += ' ';
    key += wide ? std::to_string(a) + "-" + std::to_string(b) : std::to_string(a) + std::to_string(b);
  }
  return key;
}

struct FrequencyEntry {
  std::string key;
  int count = 0;
  double percentage = 0.0;
};

struct FrequencyReport {
  std::vector<FrequencyEntry> entries;  // by count descending, then key
  int total_trials = 0;
  int discarded = 0;
  std::uint64_t seed = 0;

  double percentage(const std::string& key) const {
    for (const auto& e : entries) {
      if (e.key == key) return e.percentage;
    }
    return 0.0;
  }
};

inline FrequencyReport make_frequency_report(const std::map<std::string, int>& counts, int total, int discarded,
                                             std::uint64_t seed) {
  FrequencyReport rep;
  rep.total_trials = total;
  rep.discarded = discarded;
  rep.seed = seed;
  const int converged = total - discarded;
  for (const auto& [k, c] : counts) rep.entries.push_back({k, c, converged > 0 ? 100.0 * c / converged : 0.0});
  std::stable_sort(rep.entries.begin(), rep.entries.end(),
                   [](const FrequencyEntry& a, const FrequencyEntry& b) { return a.count > b.count; });
  return rep;
}

struct TrialRecord {
  int trial_index = 0;
  Eigen::MatrixXd points;   // set when the configuration varies
  Eigen::VectorXd weights;  // set when the weights vary
  Subdivision subdivision;
  std::string key;
  std::vector<int> polygon_counts;  // entry k-3 counts cells with k vertices (d = 2)
  int hull_vertices = 0;
  bool converged = false;
  int iterations = 0;
};

/// Empirical distribution of optimal subdivisions under uniform random weights.
inline FrequencyReport stratum_frequency_experiment(const PointConfiguration& config, int trials, std::uint64_t seed,
                                                    std::vector<TrialRecord>* records = nullptr,
                                                    int threads = worker_count()) {
  std::vector<TrialRecord> recs(static_cast<std::size_t>(std::max(0, trials)));
  parallel_for(trials, threads, [&](int i) {
    TrialRecord& r = recs[static_cast<std::size_t>(i)];
    r.trial_index = i;
    const WeightVector w = sample_weights_simplex(config.size(), seed, static_cast<std::uint64_t>(i));
    r.weights = w.values();
    const auto res = solver::solve_mle(config, w);
    r.subdivision = res.subdivision;
    r.key = subdivision_key(config, res.subdivision);
    r.converged = res.converged;
    r.iterations = res.iterations;
  });
  std::map<std::string, int> counts;
  int discarded = 0;
  for (const auto& r : recs) {
    if (r.converged) ++counts[r.key];
    else ++discarded;
  }
  if (records) *records = std::move(recs);
  return make_frequency_report(counts, trials, discarded, seed);
}

struct ShapeRow {
  std::vector<int> polygon_counts;
  int hull_vertices = 0;
  int count = 0;
};

struct Table1Report {
  std::string distribution;
  std::vector<TrialRecord> records;
  std::vector<ShapeRow> rows;  // by count descending
  int total_trials = 0;
  int discarded = 0;
  std::uint64_t seed = 0;

  int converged() const { return total_trials - discarded; }

  /// Share (percent of converged trials) of single-cell subdivisions.
  double trivial_share() const {
    int c = 0;
    for (const auto& r : records) c += r.converged && r.subdivision.size() == 1 ? 1 : 0;
    return converged() > 0 ? 100.0 * c / converged() : 0.0;
  }

  /// Share of subdivisions consisting of exactly one k-gon.
  double single_polygon_share(int k) const {
    int c = 0;
    for (const auto& r : records) {
      if (!r.converged || r.subdivision.size() != 1) continue;
      c += r.polygon_counts[static_cast<std::size_t>(k - 3)] == 1 ? 1 : 0;
    }
    return converged() > 0 ? 100.0 * c / converged() : 0.0;
  }

  double mean_cell_count() const {
    double s = 0;
    for (const auto& r : records) s += r.converged ? static_cast<double>(r.subdivision.size()) : 0.0;
    return converged() > 0 ? s / converged() : 0.0;
  }
};

/// Unit-weight MLE subdivisions of random planar samples, tabulated by cell shapes.
inline Table1Report table1_experiment(const Distribution& dist, int trials, std::uint64_t seed, int n = 6,
                                      int threads = worker_count()) {
  Table1Report rep;
  rep.distribution = dist.name();
  rep.total_trials = trials;
  rep.seed = seed;
  rep.records.resize(static_cast<std::size_t>(std::max(0, trials)));
  parallel_for(trials, threads, [&](int i) {
    TrialRecord& r = rep.records[static_cast<std::size_t>(i)];
    r.trial_index = i;
    std::optional<PointConfiguration> config;
    for (int attempt = 0; !config; ++attempt) {
      try {
        config = sample_points(dist, n, seed, static_cast<std::uint64_t>(i), attempt);
      } catch (const DegenerateSample&) {
        if (attempt > 100) throw;
      }
    }
    r.points = config->points();
    const auto res = solver::solve_mle(*config, WeightVector::unit(n));
    r.subdivision = res.subdivision;
    r.key = res.subdivision.to_string();
    r.converged = res.converged;
    r.iterations = res.iterations;
    r.polygon_counts.assign(static_cast<std::size_t>(n - 2), 0);
    for (const auto& cell : res.subdivision.cells()) {
      ++r.polygon_counts[static_cast<std::size_t>(hull_vertex_count_2d(*config, cell) - 3)];
    }
    r.hull_vertices = hull_vertex_count_2d(*config, all_points(*config));
  });
  std::map<std::pair<std::vector<int>, int>, int> rows;
  for (const auto& r : rep.records) {
    if (r.converged) ++rows[{r.polygon_counts, r.hull_vertices}];
    else ++rep.discarded;
  }
  for (const auto& [k, c] : rows) rep.rows.push_back({k.first, k.second, c});
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const ShapeRow& a, const ShapeRow& b) { return a.count > b.count; });
  return rep;
}

struct DPlusTwoReport {
  int d = 0;
  int n = 0;
  int trials = 0;
  int trivial = 0;
  int nontrivial = 0;
  int not_converged = 0;
  std::vector<Eigen::MatrixXd> counterexamples;

  bool passed() const { return nontrivial == 0 && not_converged == 0; }
};

/// Unit weights on random Gaussian configurations of n = d+2 points (or the
/// given n); every optimal subdivision should be trivial.
inline DPlusTwoReport d_plus_2_check(int d, int trials, std::uint64_t seed, int n = 0, int threads = worker_count()) {
  if (d < 1) throw DimensionMismatch("d must be positive");
  DPlusTwoReport rep;
  rep.d = d;
  rep.n = n > 0 ? n : d + 2;
  rep.trials = trials;
  std::vector<int> outcome(static_cast<std::size_t>(std::max(0, trials)), 0);
  std::vector<Eigen::MatrixXd> pts(outcome.size());
  parallel_for(trials, threads, [&](int i) {
    const auto c = sample_gaussian_config(rep.n, d, seed, static_cast<std::uint64_t>(i));
    const auto res = solver::solve_mle(c, WeightVector::unit(rep.n));
    pts[static_cast<std::size_t>(i)] = c.points();
    outcome[static_cast<std::size_t>(i)] = !res.converged ? 2 : (res.subdivision.size() == 1 ? 0 : 1);
  });
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i] == 0) ++rep.trivial;
    if (outcome[i] == 1) {
      ++rep.nontrivial;
      rep.counterexamples.push_back(pts[i]);
    }
    if (outcome[i] == 2) ++rep.not_converged;
  }
  return rep;
}

/// Points e_1, ..., e_d, 0 and the centroid of the simplex they span.
inline PointConfiguration special_configuration(int d) {
  if (d < 1) throw DimensionMismatch("d must be positive");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d + 2, d);
  for (int k = 0; k < d; ++k) {
    m(k, k) = 1.0;
    m(d + 1, k) = 1.0 / (d + 1);
  }
  return PointConfiguration(m);
}

/// The triangulation {D\1, ..., D\(d+1)} of the special configuration.
inline Triangulation star_triangulation(int d) {
  std::vector<Cell> cells;
  for (int drop = 0; drop <= d; ++drop) {
    Cell c;
    for (int i = 0; i < d + 2; ++i) {
      if (i != drop) c.push_back(i);
    }
    cells.push_back(c);
  }
  return Triangulation(cells);
}

struct Construction {
  PointConfiguration config;
  WeightVector weights;
  std::optional<Subdivision> expected;
};

/// Special configuration with w_{d+2}/w_1 = ratio. With split > 0 the last point
/// becomes two points at distance `split` sharing its weight equally.
inline Construction d_plus_3_construction(int d, double ratio, double split = 0.0) {
  if (d < 2) throw DimensionMismatch("the construction needs d >= 2");
  if (!(ratio > 0)) throw InvalidWeights("ratio must be positive");
  const PointConfiguration base = special_configuration(d);
  if (split <= 0.0) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(d + 2);
    w(d + 1) = ratio;
    Construction c{base, WeightVector(w, true), std::nullopt};
    if (ratio > (d + 1.0) / d) c.expected = star_triangulation(d);
    return c;
  }
  Eigen::MatrixXd m(d + 3, d);
  m.topRows(d + 1) = base.points().topRows(d + 1);
  Eigen::RowVectorXd u = Eigen::RowVectorXd::Zero(d);
  u(0) = 1.0 / std::sqrt(2.0);
  u(1) = -1.0 / std::sqrt(2.0);
  m.row(d + 1) = base.point(d + 1) + 0.5 * split * u;
  m.row(d + 2) = base.point(d + 1) - 0.5 * split * u;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(d + 3);
  w(d + 1) = w(d + 2) = ratio / 2.0;
  return {PointConfiguration(m), WeightVector(w, true), std::nullopt};
}

/// w_{d+2}/w_1 for which the optimal heights have gap α on the special configuration.
inline double alpha_weight_ratio(int d, double alpha) {
  const hfunc::Args neg(static_cast<std::size_t>(d), -alpha);
  hfunc::Args pos(static_cast<std::size_t>(d), 0.0);
  pos[0] = alpha;
  return (d + 1) * std::exp(alpha) * hfunc::h_eval(neg) / (d * hfunc::h_eval(pos));
}

struct AlphaReport {
  int d = 0;
  double alpha = 0.0;
  double ratio = 0.0;
  double threshold = 0.0;  // (d+1)/d
  double gap = 0.0;        // y_{d+2} - mean(y_1..y_{d+1})
  double spread = 0.0;     // max - min of y_1..y_{d+1}
  Subdivision subdivision;
  bool converged = false;

  bool passed(double tol = 1e-4) const {
    return converged && std::abs(gap - alpha) <= tol && spread <= tol;
  }
};

inline AlphaReport alpha_heights_check(int d, double alpha) {
  if (d < 2) throw DimensionMismatch("the check needs d >= 2");
  if (!(alpha > 0)) throw InvalidWeights("alpha must be positive");
  AlphaReport rep;
  rep.d = d;
  rep.alpha = alpha;
  rep.ratio = alpha_weight_ratio(d, alpha);
  rep.threshold = (d + 1.0) / d;
  const auto c = d_plus_3_construction(d, rep.ratio);
  const auto res = solver::solve_mle(c.config, c.weights);
  const Eigen::VectorXd head = res.heights.head(d + 1);
  rep.gap = res.heights(d + 1) - head.mean();
  rep.spread = head.maxCoeff() - head.minCoeff();
  rep.subdivision = res.subdivision;
  rep.converged = res.converged;
  return rep;
}

}  // namespace tentmle::experiments
