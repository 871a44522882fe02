// Copyright 2026 The MagSpec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "magspec/dataset.hpp"

#include <doctest.h>

#include <fstream>

#include "magspec/csv.hpp"
#include "test_util.hpp"

using namespace magspec;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.n = 30;
  spec.num_views = 2;
  spec.num_clusters = 3;
  spec.view_dims = {4, 5};
  spec.cluster_spread = 0.2;
  spec.noise_sigma = 0.05;
  spec.seed = 9;
  return spec;
}

}  // namespace

TEST_CASE("load_dataset: single view without labels") {
  testutil::TempDir dir("load_single");
  std::ofstream out(dir.path() / "view_0.csv");
  out << "1,2\n3,4\n5,6\n";
  out.close();
  const MultiViewDataset data = load_dataset(dir.str());
  CHECK(data.n == 3);
  CHECK(data.num_views == 1);
  CHECK_FALSE(data.labels.has_value());
  CHECK(data.views[0](2, 1) == doctest::Approx(6.0));
}

TEST_CASE("load_dataset: error taxonomy") {
  testutil::TempDir dir("load_errors");
  SUBCASE("missing views") {
    CHECK_THROWS_AS(load_dataset(dir.str()), LoadError);
  }
  SUBCASE("row count mismatch across views") {
    std::ofstream(dir.path() / "view_0.csv") << "1,2\n3,4\n5,6\n7,8\n";
    std::ofstream(dir.path() / "view_1.csv") << "1\n2\n3\n4\n5\n";
    CHECK_THROWS_AS(load_dataset(dir.str()), ShapeError);
  }
  SUBCASE("non-numeric cell names file and line") {
    std::ofstream(dir.path() / "view_0.csv") << "1,2\nx,4\n";
    try {
      load_dataset(dir.str());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string message = e.what();
      CHECK(message.find("view_0.csv:2") != std::string::npos);
    }
  }
  SUBCASE("ragged rows") {
    std::ofstream(dir.path() / "view_0.csv") << "1,2\n3\n";
    CHECK_THROWS_AS(load_dataset(dir.str()), ParseError);
  }
}

TEST_CASE("save/load round-trip is exact") {
  const MultiViewDataset data = generate_synthetic(small_spec());
  testutil::TempDir dir("roundtrip");
  save_dataset(dir.str(), data);
  const MultiViewDataset loaded = load_dataset(dir.str());
  REQUIRE(loaded.num_views == data.num_views);
  for (int v = 0; v < data.num_views; ++v) {
    CHECK(loaded.views[static_cast<std::size_t>(v)] ==
          data.views[static_cast<std::size_t>(v)]);
  }
  REQUIRE(loaded.labels.has_value());
  CHECK(*loaded.labels == *data.labels);
}

TEST_CASE("minmax_normalize: affine map, constant columns, idempotence") {
  MultiViewDataset data;
  data.n = 3;
  data.num_views = 1;
  Matrix view(3, 2);
  view << 0, 7, 5, 7, 10, 7;
  data.views.push_back(view);

  const MultiViewDataset normalized = minmax_normalize(data);
  CHECK(normalized.views[0](0, 0) == doctest::Approx(0.0));
  CHECK(normalized.views[0](1, 0) == doctest::Approx(0.5));
  CHECK(normalized.views[0](2, 0) == doctest::Approx(1.0));
  for (Index i = 0; i < 3; ++i) CHECK(normalized.views[0](i, 1) == 0.0);

  const MultiViewDataset twice = minmax_normalize(normalized);
  CHECK((twice.views[0] - normalized.views[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("minmax_normalize: random view lands exactly on [0,1]") {
  Rng rng(5);
  MultiViewDataset data;
  data.n = 5;
  data.num_views = 1;
  data.views.push_back(testutil::random_matrix(5, 3, rng, -4.0, 9.0));
  const MultiViewDataset normalized = minmax_normalize(data);
  for (Index c = 0; c < 3; ++c) {
    CHECK(normalized.views[0].col(c).minCoeff() == doctest::Approx(0.0));
    CHECK(normalized.views[0].col(c).maxCoeff() == doctest::Approx(1.0));
  }
}

TEST_CASE("generate_synthetic: determinism and degenerate spread") {
  const SyntheticSpec spec = small_spec();
  const MultiViewDataset a = generate_synthetic(spec);
  const MultiViewDataset b = generate_synthetic(spec);
  for (int v = 0; v < spec.num_views; ++v) {
    CHECK(a.views[static_cast<std::size_t>(v)] == b.views[static_cast<std::size_t>(v)]);
  }
  CHECK(*a.labels == *b.labels);

  SyntheticSpec tiny = spec;
  tiny.cluster_spread = 1e-12;
  tiny.noise_sigma = 0.0;
  const MultiViewDataset degenerate = generate_synthetic(tiny);
  // Rows collapse onto their cluster centers: same-label rows agree.
  const Matrix& view = degenerate.views[0];
  for (Index i = 0; i < tiny.n; ++i) {
    const Index j = i % tiny.num_clusters;  // first row with the same label
    CHECK((view.row(i) - view.row(j)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("generate_synthetic: conflict view corrupts exactly floor(rate*n) rows") {
  SyntheticSpec spec = small_spec();
  spec.n = 100;
  spec.conflict_rate = 0.3;
  const MultiViewDataset conflicted = generate_synthetic(spec);

  SyntheticSpec clean_spec = spec;
  clean_spec.conflict_rate = 0.0;
  const MultiViewDataset clean = generate_synthetic(clean_spec);

  // Non-conflict views are bit-identical; the conflict view differs in
  // exactly 30 rows.
  CHECK(conflicted.views[0] == clean.views[0]);
  int differing = 0;
  const int conflict_view = spec.num_views - 1;
  for (Index i = 0; i < spec.n; ++i) {
    if (conflicted.views[static_cast<std::size_t>(conflict_view)].row(i) !=
        clean.views[static_cast<std::size_t>(conflict_view)].row(i)) {
      ++differing;
    }
  }
  CHECK(differing == 30);
}

TEST_CASE("generate_synthetic: n < K rejected") {
  SyntheticSpec spec = small_spec();
  spec.n = 2;
  CHECK_THROWS_AS(generate_synthetic(spec), ParameterError);
}
