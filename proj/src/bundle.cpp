// SPDX-License-Identifier: Apache-2.0
#include "oodeval/bundle.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oodeval/errors.hpp"
#include "oodeval/matrix_io.hpp"

namespace oodeval {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Eigen::MatrixXd to_dense_f64(const MatrixFile& m, const std::string& what) {
  if (m.dtype != Dtype::f32)
    throw DataError("bundle: " + what + " must have dtype f32");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows),
                      static_cast<Eigen::Index>(m.cols));
  for (uint64_t r = 0; r < m.rows; ++r)
    for (uint64_t c = 0; c < m.cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          static_cast<double>(m.f32[r * m.cols + c]);
  return out;
}

std::string path_field(const json& obj, const std::string& key,
                       const std::string& where) {
  if (!obj.contains(key))
    throw DataError("bundle manifest: missing key '" + where + "." + key + "'");
  if (!obj.at(key).is_string())
    throw DataError("bundle manifest: '" + where + "." + key +
                    "' must be a path string");
  return obj.at(key).get<std::string>();
}

Eigen::MatrixXd load_f64(const fs::path& base, const std::string& rel,
                         const std::string& what) {
  return to_dense_f64(read_matrix((base / rel).string()), what);
}

}  // namespace

const SetData* EvalBundle::find_ood(const std::string& name) const {
  for (const auto& [set_name, data] : ood_sets)
    if (set_name == name) return &data;
  return nullptr;
}

EvalBundle load_bundle(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("bundle: cannot open manifest " + manifest_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("bundle: manifest is not valid JSON: ") +
                    e.what());
  }
  const fs::path base = fs::path(manifest_path).parent_path();

  for (const char* key : {"id_train", "id_test", "ood", "last_layer"})
    if (!doc.contains(key))
      throw DataError(std::string("bundle manifest: missing key '") + key + "'");

  EvalBundle b;
  const json& train = doc.at("id_train");
  b.train_features = load_f64(base, path_field(train, "features", "id_train"),
                              "id_train.features");
  b.train_logits =
      load_f64(base, path_field(train, "logits", "id_train"), "id_train.logits");
  {
    const MatrixFile lab =
        read_matrix((base / path_field(train, "labels", "id_train")).string());
    if (lab.dtype != Dtype::u32)
      throw DataError("bundle: id_train.labels must have dtype u32");
    if (lab.rows != 1 && lab.cols != 1)
      throw DataError("bundle: id_train.labels must be a vector");
    b.train_labels = lab.u32;
  }

  const json& test = doc.at("id_test");
  b.id_test.logits =
      load_f64(base, path_field(test, "logits", "id_test"), "id_test.logits");
  if (test.contains("features")) {
    b.id_test.features = load_f64(base, path_field(test, "features", "id_test"),
                                  "id_test.features");
    b.id_test.has_features = true;
  }

  const json& ood = doc.at("ood");
  if (!ood.is_object() || ood.empty())
    throw DataError("bundle: at least one OOD set required");
  std::vector<std::string> names;
  for (auto it = ood.begin(); it != ood.end(); ++it) names.push_back(it.key());
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    const json& entry = ood.at(name);
    SetData s;
    s.logits = load_f64(base, path_field(entry, "logits", "ood." + name),
                        "ood." + name + ".logits");
    if (entry.contains("features")) {
      s.features = load_f64(base, path_field(entry, "features", "ood." + name),
                            "ood." + name + ".features");
      s.has_features = true;
    }
    b.ood_sets.emplace_back(name, std::move(s));
  }

  const json& layer = doc.at("last_layer");
  b.weights = load_f64(base, path_field(layer, "weights", "last_layer"),
                       "last_layer.weights");
  const Eigen::MatrixXd bias_mat = load_f64(
      base, path_field(layer, "bias", "last_layer"), "last_layer.bias");
  if (bias_mat.rows() != 1 && bias_mat.cols() != 1)
    throw DataError("bundle: last_layer.bias must be a vector");
  b.bias = bias_mat.rows() == 1 ? bias_mat.row(0).transpose()
                                : Eigen::VectorXd(bias_mat.col(0));

  // --- validation ---
  const Eigen::Index d = b.train_features.cols();
  const Eigen::Index C = b.train_logits.cols();

  if (b.train_features.rows() != b.train_logits.rows())
    throw DataError("bundle: id_train features/logits row count mismatch");
  if (static_cast<Eigen::Index>(b.train_labels.size()) !=
      b.train_features.rows())
    throw DataError("bundle: id_train labels length mismatch");
  if (b.weights.rows() != d || b.weights.cols() != C)
    throw DataError("bundle: last_layer.weights must be d x C");
  if (b.bias.size() != C)
    throw DataError("bundle: last_layer.bias must have length C");

  auto check_set = [&](const SetData& s, const std::string& name) {
    if (s.logits.cols() != C)
      throw DataError("bundle: logit width mismatch in " + name);
    if (s.has_features) {
      if (s.features.cols() != d)
        throw DataError("bundle: feature dimension mismatch in " + name);
      if (s.features.rows() != s.logits.rows())
        throw DataError("bundle: features/logits row count mismatch in " + name);
    }
  };
  check_set(b.id_test, "id_test");
  for (const auto& [name, s] : b.ood_sets) {
    check_set(s, "ood." + name);
    if (s.logits.rows() == 0)
      throw DataError("bundle: OOD set '" + name + "' is empty");
  }

  for (uint32_t label : b.train_labels)
    if (label >= static_cast<uint32_t>(C))
      throw DataError("bundle: label " + std::to_string(label) +
                      " out of range [0, " + std::to_string(C) + ")");

  // W,b consistency: reconstructed logits must match stored ones within
  // relative tolerance 1e-4 on the max-abs logit.
  if (b.train_features.rows() > 0) {
    const Eigen::MatrixXd reconstructed =
        (b.train_features * b.weights).rowwise() + b.bias.transpose();
    const Eigen::MatrixXd abs_err =
        (reconstructed - b.train_logits).cwiseAbs();
    Eigen::Index worst_row = 0, worst_col = 0;
    const double max_err = abs_err.maxCoeff(&worst_row, &worst_col);
    const double scale =
        std::max(b.train_logits.cwiseAbs().maxCoeff(), 1e-30);
    if (max_err > 1e-4 * scale)
      throw DataError(
          "bundle: last_layer does not reproduce id_train logits (worst "
          "sample index " +
          std::to_string(worst_row) + ", abs error " + std::to_string(max_err) +
          ", max-abs logit " + std::to_string(scale) + ")");
  }

  return b;
}

}  // namespace oodeval
