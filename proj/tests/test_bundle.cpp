// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include "oodeval/bundle.hpp"
#include "oodeval/errors.hpp"
#include "testutil.hpp"

using namespace oodeval;

TEST_CASE("bundle with logits computed as W^T h + b loads and validates") {
  testutil::TempDir tmp("bundle");
  const EvalBundle source = testutil::synthetic_bundle(11, 40, 20, 6, 3);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));

  const EvalBundle loaded = load_bundle(manifest);
  CHECK(loaded.feature_dim() == 6);
  CHECK(loaded.num_classes() == 3);
  CHECK(loaded.train_features.rows() == 40);
  CHECK(loaded.id_test.size() == 20);
  CHECK(loaded.ood_sets.size() == 2);
}

TEST_CASE("ood sets iterate in lexical key order regardless of manifest order") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(12, 30, 10, 4, 2);
  // deliberately unsorted insertion order
  std::swap(source.ood_sets[0].first, source.ood_sets[1].first);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  const EvalBundle loaded = load_bundle(manifest);
  REQUIRE(loaded.ood_sets.size() == 2);
  CHECK(loaded.ood_sets[0].first == "ood_0");
  CHECK(loaded.ood_sets[1].first == "ood_1");
}

TEST_CASE("dimension-mismatched OOD set is rejected naming the set") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(13, 30, 10, 4, 2);
  std::mt19937 rng(1);
  source.ood_sets[1].second.features = testutil::random_matrix(rng, 5, 7);
  source.ood_sets[1].second.logits =
      testutil::random_matrix(rng, 5, source.num_classes());
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  CHECK_THROWS_WITH_AS(load_bundle(manifest), doctest::Contains("ood_1"),
                       DataError);
}

TEST_CASE("empty ood map is rejected") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(14, 30, 10, 4, 2);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  // rewrite the manifest with an empty ood object
  std::ifstream in(manifest);
  nlohmann::json doc = nlohmann::json::parse(in);
  in.close();
  doc["ood"] = nlohmann::json::object();
  std::ofstream out(manifest, std::ios::trunc);
  out << doc.dump();
  out.close();
  CHECK_THROWS_WITH_AS(load_bundle(manifest),
                       doctest::Contains("at least one OOD set required"),
                       DataError);
}

TEST_CASE("an empty OOD set is rejected") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(19, 30, 10, 4, 2);
  source.ood_sets[0].second.features.resize(0, 4);
  source.ood_sets[0].second.logits.resize(0, 2);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  CHECK_THROWS_WITH_AS(load_bundle(manifest), doctest::Contains("is empty"),
                       DataError);
}

TEST_CASE("missing manifest keys are reported") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(15, 30, 10, 4, 2);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  std::ifstream in(manifest);
  nlohmann::json doc = nlohmann::json::parse(in);
  in.close();
  doc["id_train"].erase("labels");
  std::ofstream out(manifest, std::ios::trunc);
  out << doc.dump();
  out.close();
  CHECK_THROWS_WITH_AS(load_bundle(manifest),
                       doctest::Contains("id_train.labels"), DataError);
}

TEST_CASE("label out of range is rejected") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(16, 30, 10, 4, 2);
  source.train_labels[5] = 9;  // C == 2
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  CHECK_THROWS_WITH_AS(load_bundle(manifest), doctest::Contains("out of range"),
                       DataError);
}

TEST_CASE("inconsistent last layer fails with worst-sample index") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(17, 30, 10, 4, 2);
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  // corrupt one stored train logit well beyond the 1e-4 relative tolerance
  MatrixFile logits = read_matrix(tmp.str("b/train_logits.oodm"));
  logits.f32[3] += 10.0f;
  write_matrix(tmp.str("b/train_logits.oodm"), logits);
  CHECK_THROWS_WITH_AS(load_bundle(manifest),
                       doctest::Contains("worst sample index"), DataError);
}

TEST_CASE("logits-only sets load with has_features false") {
  testutil::TempDir tmp("bundle");
  EvalBundle source = testutil::synthetic_bundle(18, 30, 10, 4, 2);
  source.id_test.has_features = false;
  source.ood_sets[0].second.has_features = false;
  const std::string manifest = testutil::write_bundle(source, tmp.str("b"));
  const EvalBundle loaded = load_bundle(manifest);
  CHECK_FALSE(loaded.id_test.has_features);
  CHECK_FALSE(loaded.ood_sets[0].second.has_features);
  CHECK(loaded.ood_sets[1].second.has_features);
}
