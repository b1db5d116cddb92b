// svm.cc

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

#include "geotag/svm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "geotag/eval.h"
#include "geotag/random.h"

namespace geotag {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-12;

void CheckProblem(const KernelMatrix &kernel, const std::vector<int> &labels,
                  double C) {
  const Eigen::Index n = kernel.values.rows();
  GEOTAG_VALIDATE(kernel.values.cols() == n, "train_svm: kernel is not square");
  GEOTAG_VALIDATE(static_cast<Eigen::Index>(labels.size()) == n,
                  "train_svm: ", labels.size(), " labels for a ", n, "x", n,
                  " kernel");
  GEOTAG_VALIDATE(static_cast<Eigen::Index>(kernel.row_ids.size()) == n,
                  "train_svm: kernel row ids do not match its size");
  GEOTAG_VALIDATE(C > 0.0, "train_svm: C must be > 0");
  GEOTAG_VALIDATE(kernel.values.allFinite(), "train_svm: non-finite kernel");
  const double scale = std::max(1.0, kernel.values.cwiseAbs().maxCoeff());
  GEOTAG_VALIDATE((kernel.values - kernel.values.transpose()).cwiseAbs().maxCoeff() <=
                      1e-12 * scale,
                  "train_svm: kernel is not symmetric");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    GEOTAG_VALIDATE(y == 1 || y == -1, "train_svm: labels must be +1 or -1");
    has_pos |= y == 1;
    has_neg |= y == -1;
  }
  GEOTAG_VALIDATE(has_pos && has_neg,
                  "train_svm: both classes must be present in the labels");
}

// G = Q alpha - e recomputed from scratch.
void RefreshGradient(const Matrix &k, const Vector &y, const Vector &alpha,
                     Vector *grad) {
  const Vector ya = y.cwiseProduct(alpha);
  *grad = y.cwiseProduct(k * ya) - Vector::Ones(y.size());
}

}  // namespace

SvmModel TrainSvm(const KernelMatrix &kernel, const std::vector<int> &labels,
                  double C, const SvmOptions &opts,
                  const std::string &kernel_ref) {
  CheckProblem(kernel, labels, C);
  // Solve for beta = s * alpha on K / s with box [0, s C]. The gradient is
  // unchanged, and (c K, C / c) maps to the same scaled problem.
  int exponent = 0;
  std::frexp(kernel.values.cwiseAbs().maxCoeff(), &exponent);
  const double s = std::ldexp(1.0, exponent);
  const Matrix k = kernel.values / s;
  const double box = C * s;
  const Eigen::Index n = k.rows();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[i];

  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // Q alpha - e
  auto at_upper = [&](Eigen::Index t) { return alpha(t) >= box; };
  auto at_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

  bool refreshed = false;
  std::int64_t iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    // First index: maximal violation of -y_t G_t over the "up" set.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0 ? !at_upper(t) : !at_lower(t)) {
        if (-y(t) * grad(t) >= gmax) {
          gmax = -y(t) * grad(t);
          i = t;
        }
      }
    }
    // Second index: largest second-order decrease over the "low" set.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0 ? !at_lower(t) : !at_upper(t)) {
        const double yg = y(t) * grad(t);
        gmax2 = std::max(gmax2, yg);
        const double grad_diff = gmax + yg;
        if (i >= 0 && grad_diff > 0.0) {
          double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -grad_diff * grad_diff / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      }
    }
    // The gradient is only known to about eps * (|beta|_1 + 1) on K / s.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         (alpha.sum() + 1.0);
    if (gmax + gmax2 < std::max(opts.tolerance, floor) || j < 0) {
      // Drop accumulated rounding in the gradient before accepting.
      if (refreshed) break;
      RefreshGradient(k, y, alpha, &grad);
      refreshed = true;
      continue;
    }
    refreshed = false;

    const double old_i = alpha(i), old_j = alpha(j);
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= 0.0) quad = kTau;
    if (y(i) != y(j)) {
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) {
          alpha(j) = 0.0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > box) {
          alpha(i) = box;
          alpha(j) = box - diff;
        }
      } else if (alpha(j) > box) {
        alpha(j) = box;
        alpha(i) = box + diff;
      }
    } else {
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > box) {
        if (alpha(i) > box) {
          alpha(i) = box;
          alpha(j) = sum - box;
        }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0;
        alpha(i) = sum;
      }
      if (sum > box) {
        if (alpha(j) > box) {
          alpha(j) = box;
          alpha(i) = sum - box;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = sum;
      }
    }
    const double d_i = (alpha(i) - old_i) * y(i);
    const double d_j = (alpha(j) - old_j) * y(j);
    if (d_i == 0.0 && d_j == 0.0) {
      if (refreshed) break;
      RefreshGradient(k, y, alpha, &grad);
      refreshed = true;
      continue;
    }
    // G_t += Q_ti d_alpha_i + Q_tj d_alpha_j with Q_ts = y_t y_s K_ts.
    grad.array() += y.array() * (k.col(i).array() * d_i + k.col(j).array() * d_j);
  }
  if (iter == opts.max_iters)
    GEOTAG_WARN("train_svm: reached max_iters = ", opts.max_iters,
                " before convergence");

  // b = -rho; rho averages y_i G_i over free vectors.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (at_upper(t)) {
      if (y(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? free_sum / n_free : (ub + lb) / 2.0;

  SvmModel model;
  model.bias = -rho;
  model.C = C;
  model.kernel_ref = kernel_ref;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double a = at_upper(t) ? C : std::min(alpha(t) / s, C);
    if (a > kSupportThreshold) {
      model.support_ids.push_back(kernel.row_ids[t]);
      model.dual_coeffs.push_back(a * y(t));
    }
  }
  return model;
}

Vector DualVariables(const SvmModel &model, const KernelMatrix &kernel,
                     const std::vector<int> &labels) {
  std::map<std::string, double> coeff;
  for (std::size_t s = 0; s < model.support_ids.size(); ++s)
    coeff[model.support_ids[s]] = model.dual_coeffs[s];
  Vector alpha = Vector::Zero(kernel.size());
  for (Eigen::Index t = 0; t < kernel.size(); ++t) {
    auto it = coeff.find(kernel.row_ids[t]);
    if (it != coeff.end()) alpha(t) = it->second * labels[t];
  }
  return alpha;
}

double DualObjective(const KernelMatrix &kernel, const std::vector<int> &labels,
                     const Vector &alpha) {
  Vector ya(alpha.size());
  for (Eigen::Index t = 0; t < alpha.size(); ++t) ya(t) = labels[t] * alpha(t);
  return 0.5 * ya.dot(kernel.values * ya) - alpha.sum();
}

Vector DecisionValues(const SvmModel &model, const CrossKernel &kernel) {
  std::map<std::string, Eigen::Index> column;
  for (std::size_t c = 0; c < kernel.col_ids.size(); ++c)
    column.emplace(kernel.col_ids[c], static_cast<Eigen::Index>(c));
  Vector scores = Vector::Constant(kernel.values.rows(), model.bias);
  for (std::size_t s = 0; s < model.support_ids.size(); ++s) {
    auto it = column.find(model.support_ids[s]);
    GEOTAG_VALIDATE(it != column.end(), "decision_values: support vector '",
                    model.support_ids[s], "' missing from kernel columns");
    scores += model.dual_coeffs[s] * kernel.values.col(it->second);
  }
  return scores;
}

void CvConfig::Check() const {
  GEOTAG_VALIDATE(folds >= 2, "cv: folds must be >= 2");
  GEOTAG_VALIDATE(!c_grid.empty(), "cv: empty C grid");
  for (double c : c_grid) GEOTAG_VALIDATE(c > 0.0, "cv: C values must be > 0");
}

std::vector<int> StratifiedFolds(const std::vector<int> &labels, int folds,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), 0);
  int next = 0;
  for (int cls : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t t = 0; t < labels.size(); ++t)
      if (labels[t] == cls) members.push_back(t);
    rng.Shuffle(&members);
    for (std::size_t m : members) {
      fold_of[m] = next;
      next = (next + 1) % folds;
    }
  }
  return fold_of;
}

namespace {

bool FoldsAreUsable(const std::vector<int> &labels, const std::vector<int> &fold_of,
                    int folds) {
  std::vector<int> pos(folds, 0), neg(folds, 0);
  for (std::size_t t = 0; t < labels.size(); ++t)
    (labels[t] > 0 ? pos : neg)[fold_of[t]]++;
  for (int f = 0; f < folds; ++f)
    if (pos[f] == 0 || neg[f] == 0) return false;
  return true;
}

KernelMatrix SubKernel(const KernelMatrix &kernel,
                       const std::vector<Eigen::Index> &rows) {
  KernelMatrix sub;
  const auto m = static_cast<Eigen::Index>(rows.size());
  sub.values.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) sub.values(a, b) = kernel.values(rows[a], rows[b]);
  for (Eigen::Index r : rows) sub.row_ids.push_back(kernel.row_ids[r]);
  sub.gamma = kernel.gamma;
  return sub;
}

CrossKernel SubCross(const KernelMatrix &kernel, const std::vector<Eigen::Index> &rows,
                     const std::vector<Eigen::Index> &cols) {
  CrossKernel cross;
  cross.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      cross.values(a, b) = kernel.values(rows[a], cols[b]);
  for (Eigen::Index r : rows) cross.row_ids.push_back(kernel.row_ids[r]);
  for (Eigen::Index c : cols) cross.col_ids.push_back(kernel.row_ids[c]);
  return cross;
}

}  // namespace

CvResult CrossValidateC(const KernelMatrix &kernel, const std::vector<int> &labels,
                        const CvConfig &cfg, const SvmOptions &opts) {
  cfg.Check();
  CheckProblem(kernel, labels, 1.0);
  GEOTAG_VALIDATE(static_cast<int>(labels.size()) >= cfg.folds, "cv: ",
                  labels.size(), " examples is fewer than ", cfg.folds, " folds");

  CvResult result;
  constexpr int kMaxAttempts = 10;
  bool usable = false;
  for (int attempt = 0; attempt < kMaxAttempts && !usable; ++attempt) {
    result.fold_of = StratifiedFolds(labels, cfg.folds, cfg.seed + attempt);
    usable = FoldsAreUsable(labels, result.fold_of, cfg.folds);
  }
  GEOTAG_VALIDATE(usable, "cv: could not build ", cfg.folds,
                  " folds that each contain both classes after ", kMaxAttempts,
                  " attempts");

  result.c_grid = cfg.c_grid;
  std::sort(result.c_grid.begin(), result.c_grid.end());
  result.fold_scores.assign(result.c_grid.size(), std::vector<double>(cfg.folds));
  result.mean_scores.assign(result.c_grid.size(), 0.0);

  for (int f = 0; f < cfg.folds; ++f) {
    std::vector<Eigen::Index> train_rows, held_rows;
    for (std::size_t t = 0; t < labels.size(); ++t)
      (result.fold_of[t] == f ? held_rows : train_rows)
          .push_back(static_cast<Eigen::Index>(t));
    const KernelMatrix train_k = SubKernel(kernel, train_rows);
    const CrossKernel held_k = SubCross(kernel, held_rows, train_rows);
    std::vector<int> train_y, held_y;
    for (Eigen::Index r : train_rows) train_y.push_back(labels[r]);
    for (Eigen::Index r : held_rows) held_y.push_back(labels[r]);

    for (std::size_t c = 0; c < result.c_grid.size(); ++c) {
      const SvmModel model = TrainSvm(train_k, train_y, result.c_grid[c], opts);
      const Vector scores = DecisionValues(model, held_k);
      double score = 0.0;
      if (cfg.metric == SelectionMetric::kAveragePrecision) {
        std::vector<bool> relevant;
        for (int y : held_y) relevant.push_back(y > 0);
        score = AveragePrecision(scores, relevant, held_k.row_ids);
      } else {
        int correct = 0;
        for (std::size_t t = 0; t < held_y.size(); ++t)
          correct += ((scores(t) >= 0.0 ? 1 : -1) == held_y[t]);
        score = static_cast<double>(correct) / held_y.size();
      }
      result.fold_scores[c][f] = score;
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 0; c < result.c_grid.size(); ++c) {
    double sum = 0.0;
    for (double s : result.fold_scores[c]) sum += s;
    result.mean_scores[c] = sum / cfg.folds;
    if (result.mean_scores[c] > result.mean_scores[best]) best = c;
  }
  result.best_C = result.c_grid[best];
  return result;
}

}  // namespace geotag
