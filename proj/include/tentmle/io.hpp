#pragma once

// JSON and CSV formats. Point indices in every file are 1-based.

#include <Eigen/Dense>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tentmle/duality.hpp"
#include "tentmle/errors.hpp"
#include "tentmle/experiments.hpp"
#include "tentmle/geometry.hpp"
#include "tentmle/quadrature.hpp"
#include "tentmle/solver.hpp"

namespace tentmle::io {

using Json = nlohmann::json;

inline Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidConfiguration(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidConfiguration(std::string(what) + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Json matrix_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

inline Eigen::MatrixXd matrix_from(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InvalidConfiguration(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InvalidConfiguration(std::string(what) + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InvalidConfiguration(std::string(what) + ": entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

// Configuration: {"points": [[...], ...], "labels": [...]}.

inline Json to_json(const PointConfiguration& c) {
  Json j{{"points", matrix_json(c.points())}};
  if (!c.labels().empty()) j["labels"] = c.labels();
  return j;
}

inline PointConfiguration configuration_from(const Json& j) {
  if (!j.is_object() || !j.contains("points")) throw InvalidConfiguration("missing \"points\"");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw InvalidConfiguration("\"labels\" must be an array of strings");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw InvalidConfiguration("\"labels\" must be an array of strings");
      labels.push_back(l.get<std::string>());
    }
  }
  return PointConfiguration(matrix_from(j["points"], "points"), std::move(labels));
}

// Subdivision: {"cells": [[1, 2, 4], ...]}.

inline Json cells_json(const Subdivision& s) { return s.labels(); }

inline Subdivision subdivision_from(const Json& j) {
  const Json& cells = j.is_object() ? j.at("cells") : j;
  if (!cells.is_array()) throw InvalidConfiguration("\"cells\" must be an array of index arrays");
  std::vector<std::vector<int>> labels;
  for (const auto& c : cells) {
    if (!c.is_array()) throw InvalidConfiguration("\"cells\" must be an array of index arrays");
    std::vector<int> l;
    for (const auto& v : c) {
      if (!v.is_number_integer()) throw InvalidConfiguration("cell entries must be integers");
      l.push_back(v.get<int>());
    }
    labels.push_back(std::move(l));
  }
  return Subdivision::from_labels(labels);
}

inline Json to_json(const Subdivision& s) { return Json{{"cells", cells_json(s)}}; }

inline void check_indices(const PointConfiguration& c, const Subdivision& s) {
  for (const auto& cell : s.cells()) {
    for (Index v : cell) {
      if (v >= c.size()) throw DimensionMismatch("cell index " + std::to_string(v + 1) + " exceeds point count");
    }
  }
}

/// A problem file: a configuration plus optional weights, heights and cells.
struct Problem {
  PointConfiguration config;
  std::optional<Eigen::VectorXd> weights;
  std::optional<Eigen::VectorXd> heights;
  std::optional<Subdivision> subdivision;
};

inline Problem problem_from(const Json& j) {
  Problem p{configuration_from(j), std::nullopt, std::nullopt, std::nullopt};
  auto sized = [&](const char* key) {
    Eigen::VectorXd v = vector_from(j[key], key);
    if (v.size() != p.config.size()) {
      throw DimensionMismatch(std::string("\"") + key + "\" has " + std::to_string(v.size()) + " entries, expected " +
                              std::to_string(p.config.size()));
    }
    return v;
  };
  if (j.contains("weights")) p.weights = sized("weights");
  if (j.contains("heights")) p.heights = sized("heights");
  if (j.contains("cells")) {
    p.subdivision = subdivision_from(j);
    check_indices(p.config, *p.subdivision);
  }
  return p;
}

inline Json to_json(const Problem& p) {
  Json j = to_json(p.config);
  if (p.weights) j["weights"] = vector_json(*p.weights);
  if (p.heights) j["heights"] = vector_json(*p.heights);
  if (p.subdivision) j["cells"] = cells_json(*p.subdivision);
  return j;
}

inline Json to_json(const solver::MleResult& r) {
  return Json{{"heights", vector_json(r.heights)},
              {"cells", cells_json(r.subdivision)},
              {"log_likelihood", r.log_likelihood},
              {"mass", r.mass},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"grad_norm", r.grad_norm},
              {"objective_trace", r.objective_trace},
              {"certificate_size", r.certificate_size}};
}

inline solver::MleResult mle_result_from(const Json& j) {
  solver::MleResult r;
  r.heights = vector_from(j.at("heights"), "heights");
  r.subdivision = subdivision_from(j);
  r.log_likelihood = j.at("log_likelihood").get<double>();
  r.mass = j.at("mass").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  r.certificate_size = j.at("certificate_size").get<decltype(r.certificate_size)>();
  return r;
}

inline Json to_json(const quadrature::MassResult& m) {
  Json cells = Json::array();
  for (const auto& c : m.per_cell) {
    std::vector<int> l;
    for (Index v : c.cell) l.push_back(v + 1);
    cells.push_back(Json{{"cell", l}, {"mass", c.mass}});
  }
  return Json{{"total_mass", m.total_mass}, {"per_cell", cells}};
}

inline quadrature::MassResult mass_result_from(const Json& j) {
  quadrature::MassResult m;
  m.total_mass = j.at("total_mass").get<double>();
  for (const auto& c : j.at("per_cell")) {
    quadrature::CellMass cm;
    for (int v : c.at("cell").get<std::vector<int>>()) cm.cell.push_back(v - 1);
    cm.mass = c.at("mass").get<double>();
    m.per_cell.push_back(std::move(cm));
  }
  return m;
}

inline Json to_json(const duality::NormalConeGenerators& g) {
  Json gens = Json::array();
  for (const auto& [t, w] : g.generators) gens.push_back(Json{{"cells", cells_json(t)}, {"weights", vector_json(w)}});
  return Json{{"heights", vector_json(g.base_heights)}, {"generators", gens}};
}

inline duality::NormalConeGenerators cone_from(const Json& j) {
  duality::NormalConeGenerators g;
  g.base_heights = vector_from(j.at("heights"), "heights");
  for (const auto& e : j.at("generators")) g.generators.emplace_back(subdivision_from(e), vector_from(e.at("weights"), "weights"));
  return g;
}

inline Json to_json(const duality::Realization& r) {
  return Json{{"weights", vector_json(r.weights.values())},
              {"heights", vector_json(r.heights)},
              {"attempts", r.attempts},
              {"generator_count", r.generator_count}};
}

inline duality::Realization realization_from(const Json& j) {
  return duality::Realization{WeightVector(vector_from(j.at("weights"), "weights")), vector_from(j.at("heights"), "heights"),
                              j.at("attempts").get<int>(), j.at("generator_count").get<std::size_t>()};
}

inline Json to_json(const duality::RankReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    samples.push_back(Json{{"heights", vector_json(s.heights)}, {"rank", s.rank}, {"singular_values", s.singular_values}});
  }
  return Json{{"cells", cells_json(r.subdivision)},
              {"generator_count", r.generator_count},
              {"cone_dimension", r.cone_dimension},
              {"face_span", r.face_span},
              {"samples", samples}};
}

inline Json to_json(const experiments::FrequencyReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back(Json{{"key", e.key}, {"count", e.count}, {"percentage", e.percentage}});
  return Json{{"entries", entries}, {"total_trials", r.total_trials}, {"discarded", r.discarded}, {"seed", r.seed}};
}

inline experiments::FrequencyReport frequency_report_from(const Json& j) {
  experiments::FrequencyReport r;
  for (const auto& e : j.at("entries")) {
    r.entries.push_back({e.at("key").get<std::string>(), e.at("count").get<int>(), e.at("percentage").get<double>()});
  }
  r.total_trials = j.at("total_trials").get<int>();
  r.discarded = j.at("discarded").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

inline Json to_json(const experiments::Table1Report& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"polygon_counts", row.polygon_counts}, {"hull_vertices", row.hull_vertices}, {"count", row.count}});
  }
  return Json{{"distribution", r.distribution},
              {"rows", rows},
              {"total_trials", r.total_trials},
              {"discarded", r.discarded},
              {"seed", r.seed},
              {"trivial_share", r.trivial_share()},
              {"mean_cell_count", r.mean_cell_count()}};
}

/// One CSV row per trial. Columns: trial, converged, iterations, cells, key,
/// hull_vertices, polygon_counts, weights, points.
inline std::string trial_csv(const std::vector<experiments::TrialRecord>& records) {
  auto join = [](const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index i = 0; i < m.size(); ++i) os << (i ? " " : "") << m.data()[i];
    return os.str();
  };
  std::ostringstream os;
  os << "trial,converged,iterations,cells,key,hull_vertices,polygon_counts,weights,points\n";
  for (const auto& r : records) {
    std::string counts;
    for (std::size_t k = 0; k < r.polygon_counts.size(); ++k) counts += (k ? " " : "") + std::to_string(r.polygon_counts[k]);
    // Points are written row by row.
    const Eigen::MatrixXd pts = r.points.transpose();
    os << r.trial_index << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ",\"" << r.subdivision.to_string() << "\",\""
       << r.key << "\"," << r.hull_vertices << ",\"" << counts << "\",\"" << join(r.weights) << "\",\"" << join(pts) << "\"\n";
  }
  return os.str();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfiguration("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidConfiguration(path + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfiguration("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfiguration("cannot write " + path);
  out << text;
}

}  // namespace tentmle::io
