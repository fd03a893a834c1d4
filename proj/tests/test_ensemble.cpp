// tests/test_ensemble.cpp

// Copyright 2026  echopad authors

// See ../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "echopad/ensemble.hpp"
#include "echopad/error.hpp"
#include "support.hpp"

using namespace echopad;
using namespace echopad::ensemble;

namespace {

struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
};

// Two overlapping Gaussian blobs; the first dimension carries the signal.
Dataset blobs(testing::Gen& g, std::size_t n, std::size_t d, double sep = 1.0) {
  Dataset ds{{n, d, std::vector<double>(n * d)}, std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    ds.y[i] = i % 2 ? kBonaFide : kAttack;
    for (std::size_t k = 0; k < d; ++k)
      ds.x.values[i * d + k] = g.normal() * (k + 1) + (k == 0 ? 0.5 * sep * ds.y[i] : 0.0) + 3.0 * k;
  }
  return ds;
}

std::vector<embed::EmbeddingGrid> random_grids(testing::Gen& g, std::size_t n, std::size_t side, std::size_t d,
                                               std::vector<int>& labels) {
  std::vector<embed::EmbeddingGrid> grids;
  labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i % 3 == 0 ? kAttack : kBonaFide;
    embed::EmbeddingGrid grid(side, d);
    for (std::size_t c = 0; c < side * side; ++c)
      for (std::size_t k = 0; k < d; ++k)
        grid.values[c * d + k] = g.normal() + 0.3 * labels[i] * static_cast<double>((c + k) % 3);
    grids.push_back(std::move(grid));
  }
  return grids;
}

}  // namespace

TEST_CASE("separable 1-D data orients w toward bona fide") {
  FeatureMatrix x{2, 1, {-1.0, 1.0}};
  const std::vector<int> y{kAttack, kBonaFide};
  const auto svm = train_svm(x, y, SvmParams{}, 1);
  CHECK(svm.w[0] > 0.0);
  CHECK(svm.score(std::vector<double>{1.0}) > svm.score(std::vector<double>{-1.0}));
}

TEST_CASE("flipping labels flips the weights") {
  testing::Gen g(41);
  auto ds = blobs(g, 60, 3);
  std::vector<int> flipped(ds.y);
  for (int& v : flipped) v = -v;
  const auto a = train_svm(ds.x, ds.y, SvmParams{}, 7);
  const auto b = train_svm(ds.x, flipped, SvmParams{}, 7);
  for (std::size_t k = 0; k < 3; ++k) CHECK(b.w[k] == doctest::Approx(-a.w[k]).epsilon(1e-6));
  CHECK(b.b == doctest::Approx(-a.b).epsilon(1e-6));
}

TEST_CASE("4-point problem: objective matches a brute-force lattice search") {
  FeatureMatrix x{4, 2, {0.0, 0.0, 1.0, 0.5, 1.0, 1.0, 0.2, 1.5}};
  const std::vector<int> y{kAttack, kAttack, kBonaFide, kBonaFide};
  SvmParams p;
  p.tolerance = 1e-8;
  p.max_epochs = 100000;
  const auto svm = train_svm(x, y, p, 3);
  const double trained = primal_objective(svm, x, y, p.c_reg);

  // Standardize independently (population std), then search (w1, w2, b).
  double z[4][2];
  for (int k = 0; k < 2; ++k) {
    double mu = 0.0, var = 0.0;
    for (int i = 0; i < 4; ++i) mu += x.values[i * 2 + k] / 4.0;
    for (int i = 0; i < 4; ++i) var += (x.values[i * 2 + k] - mu) * (x.values[i * 2 + k] - mu) / 4.0;
    for (int i = 0; i < 4; ++i) z[i][k] = (x.values[i * 2 + k] - mu) / std::sqrt(var);
  }
  auto objective = [&](double w1, double w2, double b) {
    double o = 0.5 * (w1 * w1 + w2 * w2 + b * b);
    for (int i = 0; i < 4; ++i) o += std::max(0.0, 1.0 - y[i] * (w1 * z[i][0] + w2 * z[i][1] + b));
    return o;
  };
  double best = 1e300, bw1 = 0, bw2 = 0, bb = 0;
  auto search = [&](double c1, double c2, double cb, double half, double step) {
    for (double w1 = c1 - half; w1 <= c1 + half; w1 += step)
      for (double w2 = c2 - half; w2 <= c2 + half; w2 += step)
        for (double b = cb - half; b <= cb + half; b += step) {
          const double o = objective(w1, w2, b);
          if (o < best) best = o, bw1 = w1, bw2 = w2, bb = b;
        }
  };
  search(0, 0, 0, 3.0, 0.05);
  search(bw1, bw2, bb, 0.06, 0.001);
  CHECK(std::abs(trained - best) <= 1e-3);
  CHECK(trained <= best + 1e-6);
}

TEST_CASE("single-class and bad labels are rejected") {
  FeatureMatrix x{3, 1, {1.0, 2.0, 3.0}};
  try {
    train_svm(x, std::vector<int>{1, 1, 1}, SvmParams{}, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTraining);
  }
  CHECK_THROWS_AS(train_svm(x, std::vector<int>{1, 0, -1}, SvmParams{}, 0), Error);
  CHECK_THROWS_AS(train_svm(x, std::vector<int>{1, -1}, SvmParams{}, 0), Error);
}

TEST_CASE("zero-variance dimension gets sigma 1 and weight 0") {
  FeatureMatrix x{4, 2, {5.0, -1.0, 5.0, -2.0, 5.0, 1.0, 5.0, 2.0}};
  const std::vector<int> y{kAttack, kAttack, kBonaFide, kBonaFide};
  const auto svm = train_svm(x, y, SvmParams{}, 0);
  CHECK(svm.sigma[0] == 1.0);
  CHECK(svm.w[0] == 0.0);
  CHECK(svm.w[1] > 0.0);
}

TEST_CASE("property: dual objective never increases across epochs") {
  testing::Gen g(42);
  for (int trial = 0; trial < 40; ++trial) {
    auto ds = blobs(g, g.index(10, 150), g.index(1, 8), g.uniform(0.0, 3.0));
    SvmTrace tr;
    train_svm(ds.x, ds.y, SvmParams{}, g.index(0, 1000), &tr);
    REQUIRE(tr.epochs == static_cast<int>(tr.dual_objective.size()));
    REQUIRE(tr.primal_objective.size() == tr.dual_objective.size());
    for (std::size_t e = 1; e < tr.dual_objective.size(); ++e)
      REQUIRE(tr.dual_objective[e] <= tr.dual_objective[e - 1] + 1e-12 * std::abs(tr.dual_objective[e - 1]));
    // weak duality: primal >= -dual at every epoch
    for (std::size_t e = 0; e < tr.dual_objective.size(); ++e)
      REQUIRE(tr.primal_objective[e] >= -tr.dual_objective[e] - 1e-9);
  }
}

TEST_CASE("property: training is deterministic") {
  testing::Gen g(43);
  for (int trial = 0; trial < 10; ++trial) {
    auto ds = blobs(g, 80, 4);
    const auto a = train_svm(ds.x, ds.y, SvmParams{}, 99);
    const auto b = train_svm(ds.x, ds.y, SvmParams{}, 99);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
    CHECK(a.mu == b.mu);
    CHECK(a.sigma == b.sigma);
  }
}

TEST_CASE("property: affine rescaling of a feature leaves decisions unchanged") {
  testing::Gen g(44);
  for (int trial = 0; trial < 10; ++trial) {
    auto train = blobs(g, 100, 3);
    auto test = blobs(g, 50, 3);
    const std::size_t k = g.index(0, 2);
    const double a = g.uniform(0.01, 100.0), c = g.uniform(-50.0, 50.0);
    auto rescale = [&](FeatureMatrix m) {
      for (std::size_t i = 0; i < m.rows; ++i) m.values[i * m.cols + k] = a * m.values[i * m.cols + k] + c;
      return m;
    };
    const auto m1 = train_svm(train.x, train.y, SvmParams{}, 5);
    const auto m2 = train_svm(rescale(train.x), train.y, SvmParams{}, 5);
    const auto t2 = rescale(test.x);
    for (std::size_t i = 0; i < test.x.rows; ++i) {
      const double s1 = m1.score(test.x.row(i)), s2 = m2.score(t2.row(i));
      CHECK(s1 == doctest::Approx(s2).epsilon(1e-6));
      if (std::abs(s1) > 1e-6) CHECK((s1 >= 0) == (s2 >= 0));
    }
  }
}

TEST_CASE("g = 7 trains 49 models; fused is the sum of cell scores") {
  testing::Gen g(45);
  std::vector<int> labels;
  const auto grids = random_grids(g, 40, 7, 8, labels);
  const auto model = train_ensemble(grids, labels, SvmParams{}, 11);
  CHECK(model.models.size() == 49);
  CHECK(model.epochs.size() == 49);
  CHECK(std::isfinite(model.threshold));
  for (const auto& grid : grids) {
    const auto s = score(grid, model);
    REQUIRE(s.cell_scores.size() == 49);
    double sum = 0.0;
    for (double v : s.cell_scores) sum += v;
    CHECK(std::abs(s.fused - sum) <= 1e-9);
  }
}

TEST_CASE("each cell model equals a standalone SVM on that slice") {
  testing::Gen g(46);
  std::vector<int> labels;
  const auto grids = random_grids(g, 30, 3, 4, labels);
  const auto model = train_ensemble(grids, labels, SvmParams{}, 12);
  for (std::size_t cell = 0; cell < 9; ++cell) {
    FeatureMatrix m{grids.size(), 4, {}};
    for (const auto& gr : grids) {
      const auto s = gr.cell(cell);
      m.values.insert(m.values.end(), s.begin(), s.end());
    }
    const auto alone = train_svm(m, labels, SvmParams{}, 12);
    CHECK(alone.w == model.models[cell].w);
    CHECK(alone.b == model.models[cell].b);
  }
}

TEST_CASE("g = 1 degenerates to one SVM") {
  testing::Gen g(47);
  std::vector<int> labels;
  const auto grids = random_grids(g, 30, 1, 5, labels);
  const auto model = train_ensemble(grids, labels, SvmParams{}, 13);
  REQUIRE(model.models.size() == 1);
  for (const auto& gr : grids) CHECK(score(gr, model).fused == model.models[0].score(gr.cell(0)));
}

TEST_CASE("hand-built 2x2 model") {
  EnsembleModel m;
  m.g = 2;
  m.d = 2;
  m.models = {{{1.0, 2.0}, 0.5, {0.0, 0.0}, {1.0, 1.0}},
              {{-1.0, 0.0}, 0.0, {1.0, 1.0}, {2.0, 1.0}},
              {{0.0, 0.0}, -1.0, {0.0, 0.0}, {1.0, 1.0}},
              {{0.5, 0.5}, 0.25, {2.0, 2.0}, {0.5, 0.5}}};
  embed::EmbeddingGrid x(2, 2);
  x.values = {1.0, 1.0, 3.0, 5.0, 9.0, 9.0, 3.0, 1.0};
  const auto s = score(x, m);
  // 1 + 2 + .5 = 3.5;  -(3-1)/2 = -1;  -1;  .5*(1/.5) + .5*(-1/.5) + .25 = .25
  CHECK(s.cell_scores[0] == doctest::Approx(3.5));
  CHECK(s.cell_scores[1] == doctest::Approx(-1.0));
  CHECK(s.cell_scores[2] == doctest::Approx(-1.0));
  CHECK(s.cell_scores[3] == doctest::Approx(0.25));
  CHECK(s.fused == doctest::Approx(1.75));

  embed::EmbeddingGrid wrong(3, 2);
  CHECK_THROWS_AS(score(wrong, m), Error);
}

TEST_CASE("all-zero cell scores fuse to zero") {
  EnsembleModel m;
  m.g = 2;
  m.d = 1;
  m.models.assign(4, LinearSvm{{0.0}, 0.0, {0.0}, {1.0}});
  embed::EmbeddingGrid x(2, 1);
  x.values = {1, 2, 3, 4};
  CHECK(score(x, m).fused == 0.0);
}

TEST_CASE("decision boundary is inclusive and monotone") {
  EnsembleModel m;
  m.threshold = 2.5;
  CHECK(decide(2.5, m) == Decision::kBonaFide);
  CHECK(decide(3.5, m) == Decision::kBonaFide);
  CHECK(decide(1.5, m) == Decision::kAttack);
  CHECK(to_string(Decision::kBonaFide) == "bona_fide");
  testing::Gen g(48);
  for (int i = 0; i < 1000; ++i) {
    const double a = g.uniform(-10, 10), b = g.uniform(-10, 10);
    if (a <= b && decide(a, m) == Decision::kBonaFide) REQUIRE(decide(b, m) == Decision::kBonaFide);
  }
}

TEST_CASE("shape mismatch across training grids is an error") {
  std::vector<embed::EmbeddingGrid> grids{embed::EmbeddingGrid(2, 3), embed::EmbeddingGrid(2, 4)};
  CHECK_THROWS_AS(train_ensemble(grids, std::vector<int>{1, -1}, SvmParams{}, 0), Error);
}

TEST_CASE("model files are byte-identical across runs and round trip") {
  testing::TempDir dir;
  testing::Gen g1(49), g2(49);
  std::vector<int> l1, l2;
  const auto grids1 = random_grids(g1, 50, 7, 8, l1);
  const auto grids2 = random_grids(g2, 50, 7, 8, l2);
  const auto a = train_ensemble(grids1, l1, SvmParams{}, 21);
  const auto b = train_ensemble(grids2, l2, SvmParams{}, 21);
  save_model(dir / "a.json", a, {{"config_sha256", "x"}});
  save_model(dir / "b.json", b, {{"config_sha256", "x"}});
  CHECK(testing::slurp(dir / "a.json") == testing::slurp(dir / "b.json"));

  const auto back = load_model(dir / "a.json");
  CHECK(back.g == 7);
  CHECK(back.threshold == a.threshold);
  for (std::size_t i = 0; i < 49; ++i) {
    CHECK(back.models[i].w == a.models[i].w);
    CHECK(back.models[i].b == a.models[i].b);
    CHECK(back.models[i].mu == a.models[i].mu);
    CHECK(back.models[i].sigma == a.models[i].sigma);
  }
  auto doc = to_json(a);
  doc["version"] = 2;
  CHECK_THROWS_AS(model_from_json(doc), Error);
  doc = to_json(a);
  doc["cells"].erase(0);
  CHECK_THROWS_AS(model_from_json(doc), Error);
}
