// featurize_test.cc

// Copyright 2026  The Geotag Authors

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


#include "doctest.h"

#include <cmath>
#include <numbers>

#include "geotag/featurize.h"
#include "geotag/kernels.h"
#include "test_util.h"

namespace geotag {
namespace {

using testing::ErrorOf;
using testing::RandomNormal;
using testing::RandomSimplex;
using testing::RandomUniform;

GmmModel RandomModel(int g, int d, Rng *rng) {
  GmmModel m;
  m.weights = RandomSimplex(g, rng);
  m.means = RandomNormal(g, d, rng);
  m.variances = RandomUniform(g, d, rng, 0.5, 2.0);
  return m;
}

GmmModel SingleComponent(int d, Rng *rng) {
  GmmModel m = RandomModel(1, d, rng);
  m.weights(0) = 1.0;
  return m;
}

// Frame-by-frame, component-by-component posterior accumulation.
Vector TwoLoopPosteriorMass(const Matrix &rows, const GmmModel &model) {
  const Eigen::Index g_count = model.num_components();
  Vector mass = Vector::Zero(g_count);
  for (Eigen::Index t = 0; t < rows.rows(); ++t) {
    std::vector<double> logp(g_count);
    double top = -INFINITY;
    for (Eigen::Index g = 0; g < g_count; ++g) {
      double lp = std::log(model.weights(g));
      for (Eigen::Index j = 0; j < model.dim(); ++j) {
        const double v = model.variances(g, j), diff = rows(t, j) - model.means(g, j);
        lp += -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * diff * diff / v;
      }
      logp[g] = lp;
      top = std::max(top, lp);
    }
    double norm = 0.0;
    for (double lp : logp) norm += std::exp(lp - top);
    for (Eigen::Index g = 0; g < g_count; ++g) mass(g) += std::exp(logp[g] - top) / norm;
  }
  return mass / static_cast<double>(rows.rows());
}

Matrix StackTwice(const Matrix &m, bool by_rows) {
  if (by_rows) {
    Matrix out(2 * m.rows(), m.cols());
    out << m, m;
    return out;
  }
  Matrix out(m.rows(), 2 * m.cols());
  out << m, m;
  return out;
}

TEST_CASE("h_feature examples") {
  Matrix w(2, 2);
  w << 0.2, 0.8, 0.6, 0.4;
  const Histogram h = HFeature(w);
  CHECK(h.values(0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(h.values(1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(h.tag == "h");

  Matrix one(1, 2);
  one << 3, 1;
  CHECK(HFeature(one).values == Eigen::Vector2d(0.75, 0.25));

  const Histogram u = HFeature(Matrix::Constant(7, 5, 0.3));
  CHECK((u.values.array() - 0.2).abs().maxCoeff() <= 1e-15);

  Matrix zero_row(2, 4);
  zero_row << 0, 0, 0, 0, 1, 0, 0, 0;
  const Histogram z = HFeature(zero_row);
  CHECK(z.values(0) == doctest::Approx(0.625));
  CHECK(z.values(1) == doctest::Approx(0.125));

  CHECK(!ErrorOf<ValidationError>([] { HFeature(Matrix(0, 3)); }).empty());
  CHECK(!ErrorOf<ValidationError>([] { HFeature(-Matrix::Ones(2, 2)); }).empty());
}

TEST_CASE("h_feature properties") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w = RandomUniform(13 + trial, 4, &rng);
    w.row(trial % 13).setZero();
    const Histogram h = HFeature(w);
    CHECK((h.values.array() >= 0.0).all());
    CHECK(std::abs(h.values.sum() - 1.0) <= 1e-9);
    CHECK(HFeature(StackTwice(w, true)).values == h.values);
    CHECK(HFeature(w).values == h.values);
  }
}

TEST_CASE("v_feature") {
  Rng rng(22);
  const Matrix w = RandomUniform(30, 3, &rng);
  CHECK(VFeature(w, SingleComponent(3, &rng)).values == Vector::Ones(1));

  const GmmModel m = RandomModel(4, 3, &rng);
  const Histogram v = VFeature(w, m);
  CHECK(v.tag == "v");
  CHECK(std::abs(v.values.sum() - 1.0) <= 1e-9);
  CHECK((v.values - VFeature(StackTwice(w, true), m).values).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((v.values - TwoLoopPosteriorMass(w, m)).cwiseAbs().maxCoeff() <= 1e-9);

  // Raw rows, not normalized ones.
  CHECK((v.values - VFeature(w * 5.0, m).values).cwiseAbs().maxCoeff() > 1e-6);

  const Matrix same = w.row(0).replicate(9, 1);
  const Matrix post = Posteriors(m, w.row(0));
  CHECK((VFeature(same, m).values - post.row(0).transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK(!ErrorOf<ValidationError>([&] { VFeature(RandomUniform(3, 2, &rng), m); }).empty());
}

TEST_CASE("boaw_feature") {
  Rng rng(23);
  const Matrix x = RandomNormal(6, 40, &rng);
  CHECK(BoawFeature(x, SingleComponent(6, &rng)).values == Vector::Ones(1));

  for (int trial = 0; trial < 5; ++trial) {
    const GmmModel m = RandomModel(8, 6, &rng);
    const Matrix clip = RandomNormal(6, 25 + trial, &rng);
    const Histogram b = BoawFeature(clip, m);
    CHECK(b.tag == "boaw");
    CHECK((b.values.array() >= 0.0).all());
    CHECK(std::abs(b.values.sum() - 1.0) <= 1e-9);
    CHECK((b.values - TwoLoopPosteriorMass(clip.transpose(), m)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((b.values - BoawFeature(StackTwice(clip, false), m).values).cwiseAbs().maxCoeff() <=
          1e-12);
    CHECK(BoawFeature(clip, m).values == b.values);
  }
  CHECK(!ErrorOf<ValidationError>([&] { BoawFeature(RandomNormal(5, 4, &rng), RandomModel(2, 6, &rng)); })
             .empty());
}

TEST_CASE("supervector_feature") {
  Rng rng(24);
  for (int g : {1, 3, 5}) {
    const GmmModel m = RandomModel(g, 4, &rng);
    const Supervector s = SupervectorFeature(RandomNormal(4, 20, &rng), m, 16.0);
    CHECK(s.values.size() == g * 4);
    CHECK(s.values.allFinite());
  }

  // Frames sitting on the prior means with a huge relevance leave them put.
  const GmmModel m = RandomModel(3, 4, &rng);
  const Matrix on_means = m.means.transpose();
  const Supervector s = SupervectorFeature(on_means, m, 1e12);
  for (int g = 0; g < 3; ++g)
    for (int j = 0; j < 4; ++j)
      CHECK(s.values(g * 4 + j) == doctest::Approx(std::sqrt(m.weights(g)) * m.means(g, j) /
                                                   std::sqrt(m.variances(g, j)))
                                       .epsilon(1e-12));

  // Linear kernel = sum_g lambda_g mu_a,g^T Sigma_g^-1 mu_b,g.
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix xa = RandomNormal(4, 30, &rng), xb = RandomNormal(4, 18, &rng);
    const Supervector a = SupervectorFeature(xa, m, 16.0), b = SupervectorFeature(xb, m, 16.0);
    const GmmModel ma = MapAdaptMeans(m, xa.transpose(), 16.0);
    const GmmModel mb = MapAdaptMeans(m, xb.transpose(), 16.0);
    double oracle = 0.0;
    for (int g = 0; g < 3; ++g)
      for (int j = 0; j < 4; ++j)
        oracle += m.weights(g) * ma.means(g, j) * mb.means(g, j) / m.variances(g, j);
    const KernelMatrix k = LinearKernel({a, b});
    CHECK(std::abs(k.values(0, 1) - oracle) <= 1e-9);
    CHECK(SupervectorFeature(xa, m, 16.0).values == a.values);
  }
  CHECK(!ErrorOf<ValidationError>([&] { SupervectorFeature(RandomNormal(3, 5, &rng), m, 16.0); })
             .empty());
}

}  // namespace
}  // namespace geotag
