#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/forest.hpp"
#include "dgt/linalg.hpp"
#include "dgt/tree.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

inline constexpr int kModelFormatVersion = 1;

// Persisted model: a collapsed tree, a layered tree, or a forest, together
// with the normalization needed to map raw rows in and predictions out.
struct ModelFile {
  int version = kModelFormatVersion;
  Task task = Task::kRegression;
  std::vector<double> class_values;
  std::optional<NormalizationStats> normalization;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::variant<ObliqueTree, TreeParams, ForestModel> payload;

  int input_dim() const {
    if (const auto* t = std::get_if<ObliqueTree>(&payload)) return t->input_dim;
    if (const auto* p = std::get_if<TreeParams>(&payload)) return p->input_dim;
    return std::get<ForestModel>(payload).input_dim();
  }
};

namespace detail {

using Json = nlohmann::ordered_json;

inline void require_finite(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to serialize a non-finite value");
}

template <class M>
Json matrix_to_json(const M& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      require_finite(m(r, c));
      data.push_back(m(r, c));
    }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("matrix payload size does not match its shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    require_finite(v(i));
    out.push_back(v(i));
  }
  return out;
}

inline Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline Json tree_to_json(const ObliqueTree& t) {
  return Json{{"form", "collapsed"},
              {"height", t.height},
              {"input_dim", t.input_dim},
              {"num_outputs", t.num_outputs},
              {"weights", matrix_to_json(t.weights)},
              {"bias", vector_to_json(t.bias)},
              {"leaves", matrix_to_json(t.leaves)}};
}

inline ObliqueTree tree_from_json(const Json& j) {
  if (j.at("form").get<std::string>() != "collapsed") throw DataError("expected a collapsed tree");
  ObliqueTree t;
  t.height = j.at("height").get<int>();
  t.input_dim = j.at("input_dim").get<int>();
  t.num_outputs = j.at("num_outputs").get<int>();
  t.weights = matrix_from_json(j.at("weights"));
  t.bias = vector_from_json(j.at("bias"));
  t.leaves = matrix_from_json(j.at("leaves"));
  PathTables range_check(t.height);
  (void)range_check;
  if (static_cast<std::size_t>(t.weights.rows()) != num_internal(t.height) || t.weights.cols() != t.input_dim ||
      t.bias.size() != t.weights.rows() || static_cast<std::size_t>(t.leaves.rows()) != num_leaves(t.height) ||
      t.leaves.cols() != t.num_outputs) {
    throw DataError("collapsed tree payload has inconsistent shapes");
  }
  return t;
}

inline Json params_to_json(const TreeParams& p) {
  Json layers = Json::array();
  for (const Matrix& w : p.layers) layers.push_back(matrix_to_json(w));
  return Json{{"form", "layered"},
              {"height", p.height},
              {"input_dim", p.input_dim},
              {"num_outputs", p.num_outputs},
              {"layers", std::move(layers)},
              {"leaves", matrix_to_json(p.leaves)}};
}

inline TreeParams params_from_json(const Json& j) {
  TreeParams p;
  p.height = j.at("height").get<int>();
  p.input_dim = j.at("input_dim").get<int>();
  p.num_outputs = j.at("num_outputs").get<int>();
  for (const Json& w : j.at("layers")) p.layers.push_back(matrix_from_json(w));
  p.leaves = matrix_from_json(j.at("leaves"));
  try {
    p.validate();
  } catch (const ShapeError& e) {
    throw DataError(std::string("layered tree payload: ") + e.what());
  }
  return p;
}

inline const char* task_key(Task t) { return t == Task::kRegression ? "regression" : "classification"; }

inline Task task_from_key(const std::string& s) {
  if (s == "regression") return Task::kRegression;
  if (s == "classification") return Task::kClassification;
  throw DataError("unknown task '" + s + "' in model file");
}

}  // namespace detail

inline std::string serialize_model(const ModelFile& model) {
  using detail::Json;
  Json j;
  j["format"] = "dgt-model";
  j["version"] = model.version;
  j["task"] = detail::task_key(model.task);
  j["class_values"] = model.class_values;
  if (model.normalization) {
    const NormalizationStats& s = *model.normalization;
    j["normalization"] = Json{{"feature_mean", detail::vector_to_json(s.feature_mean)},
                              {"feature_scale", detail::vector_to_json(s.feature_scale)},
                              {"scale_target", s.scale_target},
                              {"target_min", s.target_min},
                              {"target_max", s.target_max}};
  } else {
    j["normalization"] = nullptr;
  }
  j["config"] = model.config;
  j["seed"] = model.seed;
  if (const auto* t = std::get_if<ObliqueTree>(&model.payload)) {
    j["kind"] = "tree";
    j["tree"] = detail::tree_to_json(*t);
  } else if (const auto* p = std::get_if<TreeParams>(&model.payload)) {
    j["kind"] = "tree";
    j["tree"] = detail::params_to_json(*p);
  } else {
    const ForestModel& f = std::get<ForestModel>(model.payload);
    j["kind"] = "forest";
    Json members = Json::array();
    for (const ObliqueTree& m : f.members) members.push_back(detail::tree_to_json(m));
    j["forest"] = Json{{"aggregation", f.task == Task::kRegression ? "average" : "vote"},
                       {"num_classes", f.num_classes},
                       {"sample_fraction", f.sample_fraction},
                       {"member_seeds", f.member_seeds},
                       {"members", std::move(members)}};
  }
  return j.dump(1) + "\n";
}

inline ModelFile parse_model(const std::string& text) {
  using detail::Json;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "dgt-model") throw DataError("not a dgt model file");
    ModelFile m;
    m.version = j.at("version").get<int>();
    if (m.version != kModelFormatVersion) {
      throw DataError("unsupported model format version " + std::to_string(m.version));
    }
    m.task = detail::task_from_key(j.at("task").get<std::string>());
    m.class_values = j.at("class_values").get<std::vector<double>>();
    if (!j.at("normalization").is_null()) {
      const Json& s = j.at("normalization");
      NormalizationStats stats;
      stats.feature_mean = detail::vector_from_json(s.at("feature_mean"));
      stats.feature_scale = detail::vector_from_json(s.at("feature_scale"));
      stats.scale_target = s.at("scale_target").get<bool>();
      stats.target_min = s.at("target_min").get<double>();
      stats.target_max = s.at("target_max").get<double>();
      m.normalization = std::move(stats);
    }
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tree") {
      const Json& t = j.at("tree");
      if (t.at("form").get<std::string>() == "collapsed") {
        m.payload = detail::tree_from_json(t);
      } else {
        m.payload = detail::params_from_json(t);
      }
    } else if (kind == "forest") {
      const Json& f = j.at("forest");
      ForestModel forest;
      forest.task = m.task;
      forest.num_classes = f.at("num_classes").get<int>();
      forest.sample_fraction = f.at("sample_fraction").get<double>();
      forest.member_seeds = f.at("member_seeds").get<std::vector<std::uint64_t>>();
      for (const Json& t : f.at("members")) forest.members.push_back(detail::tree_from_json(t));
      forest.validate();
      m.payload = std::move(forest);
    } else {
      throw DataError("unknown model kind '" + kind + "'");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const PreconditionError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << serialize_model(model);
  if (!out) throw DataError("failed writing " + path);
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

// Score vector for one normalized feature row.
inline Vector model_scores(const ModelFile& model, const PathTables* tables, const VectorRef& x) {
  if (const auto* t = std::get_if<ObliqueTree>(&model.payload)) return t->predict(x);
  if (const auto* p = std::get_if<TreeParams>(&model.payload)) {
    if (tables == nullptr) throw PreconditionError("layered model needs path tables");
    return forward_hard(x, *p, *tables).value;
  }
  return predict_forest(std::get<ForestModel>(model.payload), x);
}

}  // namespace dgt
