// kernels_test.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geotag/kernels.h"
#include "test_util.h"

namespace geotag {
namespace {

using testing::Contains;
using testing::ErrorOf;
using testing::RandomNormal;
using testing::RandomSimplex;

Histogram H(std::initializer_list<double> v) {
  Histogram h;
  h.values = Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
  return h;
}

std::vector<Histogram> RandomHistograms(int n, int m, Rng *rng, bool sparse = false) {
  std::vector<Histogram> out(n);
  for (auto &h : out) {
    h.values = RandomSimplex(m, rng);
    if (sparse) {
      h.values(rng->Index(m)) = 0.0;
      h.values /= h.values.sum();
    }
  }
  return out;
}

double MinEigenvalue(const Matrix &k) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues().minCoeff();
}

double Asymmetry(const Matrix &k) { return (k - k.transpose()).cwiseAbs().maxCoeff(); }

KernelMatrix Constant(int n, double v) {
  KernelMatrix k;
  k.values = Matrix::Constant(n, n, v);
  for (int i = 0; i < n; ++i) k.row_ids.push_back("r" + std::to_string(i));
  return k;
}

TEST_CASE("chi2_distance") {
  CHECK(Chi2Distance(H({1, 0}).values, H({0, 1}).values) == 1.0);
  CHECK(Chi2Distance(H({0.3, 0.7, 0}).values, H({0.3, 0.7, 0}).values) == 0.0);
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto hs = RandomHistograms(2, 6, &rng, true);
    const double d = Chi2Distance(hs[0].values, hs[1].values);
    CHECK(d >= 0.0);
    CHECK(std::abs(d - Chi2Distance(hs[1].values, hs[0].values)) <= 1e-15);
    CHECK(Chi2Distance(hs[0].values, hs[0].values) == 0.0);
  }
  CHECK(Contains(ErrorOf<ValidationError>([] { Chi2Distance(H({1, 0}).values, H({1}).values); }),
                 "length"));
  CHECK(Contains(
      ErrorOf<ValidationError>([] { Chi2Distance(H({1, -0.1}).values, H({1, 0}).values); }),
      "negative"));
}

TEST_CASE("average_pairwise_gamma") {
  // D([1,0],[0.5,0.5]) = 0.5 * (0.25/1.5 + 0.25/0.5) = 1/3.
  CHECK(AveragePairwiseGamma({H({1, 0}), H({0, 1})}) == 1.0);
  CHECK(AveragePairwiseGamma({H({1, 0}), H({0.5, 0.5})}) == doctest::Approx(1.0 / 3.0));

  // Scalar histograms [a], [b] have D = 0.5 (a-b)^2 / (a+b).
  const double a = 1.0, b = 0.2;
  const double dab = 0.5 * (a - b) * (a - b) / (a + b);
  const Histogram ha = H({a}), hb = H({b});
  CHECK(AveragePairwiseGamma({ha, hb}) == doctest::Approx(dab));

  Rng rng(32);
  const auto hs = RandomHistograms(3, 4, &rng);
  const double d01 = Chi2Distance(hs[0].values, hs[1].values);
  const double d02 = Chi2Distance(hs[0].values, hs[2].values);
  const double d12 = Chi2Distance(hs[1].values, hs[2].values);
  CHECK(AveragePairwiseGamma(hs) == doctest::Approx((d01 + d02 + d12) / 3.0).epsilon(1e-14));

  CHECK(Contains(ErrorOf<ValidationError>([] { AveragePairwiseGamma({H({1, 0}), H({1, 0})}); }),
                 "degenerate feature set"));
  CHECK(!ErrorOf<ValidationError>([] { AveragePairwiseGamma({H({1, 0})}); }).empty());
}

TEST_CASE("average_pairwise_gamma hand mean") {
  // [x] vs [0] has D = x/2, and [x] vs [y] with x,y > 0 has D = (x-y)^2/(2(x+y)).
  // Pick p0 = 0, p1 = 0.4, p2 = 1.2: D01 = 0.2, D02 = 0.6,
  // D12 = 0.64 / 3.2 = 0.2. Mean = 1/3.
  CHECK(AveragePairwiseGamma({H({0}), H({0.4}), H({1.2})}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // Two coordinates to hit {0.2, 0.4, 0.6}: x0 = [0.4, 0], x1 = [0, 0],
  // x2 = [0.4, 0.8] gives D01 = 0.2, D12 = 0.6, D02 = 0.4.
  CHECK(AveragePairwiseGamma({H({0.4, 0}), H({0, 0}), H({0.4, 0.8})}) ==
        doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("exp_chi2_kernel") {
  Rng rng(33);
  const auto hs = RandomHistograms(20, 8, &rng, true);
  const double gamma = AveragePairwiseGamma(hs);
  const KernelMatrix k = ExpChi2Kernel(hs, gamma);
  CHECK(k.gamma == gamma);
  CHECK(k.row_ids.front() == "0");
  CHECK(Asymmetry(k.values) <= 1e-12);
  CHECK((k.values.diagonal().array() == 1.0).all());
  CHECK((k.values.array() > 0.0).all());
  CHECK((k.values.array() <= 1.0).all());
  CHECK(MinEigenvalue(k.values) >= -1e-8);

  const double d = Chi2Distance(hs[0].values, hs[1].values);
  const KernelMatrix k2 = ExpChi2Kernel({hs[0], hs[1]}, d);
  CHECK(k2.values(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(ExpChi2Kernel({hs[0], hs[0]}, 1.0).values(0, 1) == 1.0);

  CHECK(!ErrorOf<ValidationError>([&] { ExpChi2Kernel(hs, 0.0); }).empty());
  CHECK(!ErrorOf<ValidationError>([&] { ExpChi2Kernel(hs, 1.0, {"a"}); }).empty());

  for (int n : {5, 17, 50}) {
    const auto set = RandomHistograms(n, 5, &rng);
    CHECK(MinEigenvalue(ExpChi2Kernel(set, AveragePairwiseGamma(set)).values) >= -1e-8);
  }
}

TEST_CASE("cross_exp_chi2") {
  Rng rng(34);
  const auto train = RandomHistograms(12, 6, &rng, true);
  const auto test = RandomHistograms(7, 6, &rng, true);
  const double gamma = AveragePairwiseGamma(train);
  const KernelMatrix sq = ExpChi2Kernel(train, gamma);
  CHECK(CrossExpChi2(train, train, gamma).values == sq.values);

  const CrossKernel c = CrossExpChi2(train, test, gamma);
  CHECK(c.values.rows() == 7);
  CHECK(c.values.cols() == 12);
  CHECK(c.gamma == gamma);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 12; ++j) {
      double dist = 0.0;
      for (int m = 0; m < 6; ++m) {
        const double s = test[i].values(m) + train[j].values(m);
        if (s > 0) dist += 0.5 * std::pow(test[i].values(m) - train[j].values(m), 2) / s;
      }
      CHECK(std::abs(c.values(i, j) - std::exp(-dist / gamma)) <= 1e-12);
    }
  const CrossKernel one = CrossExpChi2(train, {train[4]}, gamma);
  CHECK(one.values(0, 4) == 1.0);

  const CrossKernel same = AsCrossKernel(sq);
  CHECK(same.row_ids == same.col_ids);
  CHECK(same.values == sq.values);
}

TEST_CASE("fusion") {
  KernelMatrix a = Constant(3, 0.2), b = Constant(3, 0.6);
  CHECK(std::abs(FuseAverage({a, b}).values(1, 2) - 0.4) <= 1e-15);
  CHECK(FuseAverage({a}).values == a.values);
  CHECK(FuseProduct({a}).values == a.values);

  const KernelMatrix half = Constant(3, 0.5);
  CHECK(FuseProduct({half, half}).values(0, 1) == 0.125);

  Rng rng(35);
  std::vector<KernelMatrix> ks;
  for (int l = 0; l < 3; ++l) {
    const auto hs = RandomHistograms(15, 5, &rng);
    ks.push_back(ExpChi2Kernel(hs, AveragePairwiseGamma(hs)));
  }
  const KernelMatrix prod = FuseProduct(ks), avg = FuseAverage(ks);
  CHECK((prod.values.diagonal().array() == 1.0 / 3.0).all());
  CHECK(!prod.gamma.has_value());
  CHECK(Asymmetry(prod.values) <= 1e-12);
  CHECK(Asymmetry(avg.values) <= 1e-12);
  CHECK(MinEigenvalue(avg.values) >= -1e-8);
  CHECK(MinEigenvalue(prod.values) >= -1e-8);

  // Commutes with a simultaneous permutation of all inputs.
  std::vector<int> perm(15);
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(&perm);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(15);
  for (int i = 0; i < 15; ++i) p.indices()(i) = perm[i];
  std::vector<KernelMatrix> permuted = ks;
  for (auto &k : permuted) {
    k.values = p * k.values * p.transpose();
    std::vector<std::string> ids(15);
    for (int i = 0; i < 15; ++i) ids[perm[i]] = k.row_ids[i];
    k.row_ids = ids;
  }
  CHECK(FuseProduct(permuted).values == p * prod.values * p.transpose());
  CHECK(FuseAverage(permuted).values == p * avg.values * p.transpose());
  CHECK(FuseAverage(permuted).row_ids == permuted[0].row_ids);

  KernelMatrix other_ids = ks[1];
  other_ids.row_ids[0] = "x";
  CHECK(Contains(ErrorOf<ValidationError>([&] { FuseAverage({ks[0], other_ids}); }), "id"));
  CHECK(Contains(ErrorOf<ValidationError>([&] { FuseProduct({ks[0], Constant(4, 1.0)}); }),
                 "shape"));
  CHECK(!ErrorOf<ValidationError>([] { FuseAverage(std::vector<KernelMatrix>{}); }).empty());

  const CrossKernel ca = AsCrossKernel(Constant(2, 0.5));
  CHECK(FuseProduct({ca, ca}).values(0, 1) == 0.125);
}

TEST_CASE("linear_kernel") {
  Supervector a, b, c;
  a.values = Eigen::Vector3d(1, 0, 0);
  b.values = Eigen::Vector3d(0, 2, 0);
  c.values = Eigen::Vector3d(1, 2, 3);
  const KernelMatrix k = LinearKernel({a, b, c});
  CHECK(k.values(0, 1) == 0.0);
  CHECK(k.values(2, 2) == 14.0);

  Rng rng(36);
  std::vector<Supervector> sv(30);
  for (auto &s : sv) s.values = RandomNormal(12, 1, &rng);
  const KernelMatrix lk = LinearKernel(sv);
  CHECK(Asymmetry(lk.values) == 0.0);
  CHECK(MinEigenvalue(lk.values) >= -1e-8);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) {
      double dot = 0.0;
      for (int m = 0; m < 12; ++m) dot += sv[i].values(m) * sv[j].values(m);
      CHECK(std::abs(lk.values(i, j) - dot) <= 1e-12);
    }
  const CrossKernel cl = CrossLinear(sv, {sv[3]});
  CHECK((cl.values.row(0) - lk.values.row(3)).cwiseAbs().maxCoeff() <= 1e-12);

  Supervector bad;
  bad.values = Vector::Ones(2);
  CHECK(!ErrorOf<ValidationError>([&] { LinearKernel({a, bad}); }).empty());
}

}  // namespace
}  // namespace geotag
