#pragma once

// Reference computations used only by tests. They deliberately avoid the
// library code paths they are checked against.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Modified Gram-Schmidt with re-orthogonalisation; drops dependent columns.
inline MatrixXd mgs(const MatrixXd& a, double tol = 1e-10) {
  MatrixXd q(a.rows(), 0);
  const double scale = std::max(1.0, a.colwise().norm().maxCoeff());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    VectorXd v = a.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < q.cols(); ++i) v -= q.col(i).dot(v) * q.col(i);
    const double n = v.norm();
    if (n <= tol * scale) continue;
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v / n;
  }
  return q;
}

// Exhaustive best agreement over label permutations.
inline double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    int agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++agree;
    best = std::max(best, static_cast<double>(agree) / static_cast<double>(pred.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Normalised cut of a 2-partition: cut/vol(A) + cut/vol(B).
inline double normalized_cut(const MatrixXd& w, const std::vector<int>& side) {
  double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      (side[static_cast<std::size_t>(i)] == 0 ? vol_a : vol_b) += w(i, j);
      if (side[static_cast<std::size_t>(i)] != side[static_cast<std::size_t>(j)]) cut += w(i, j);
    }
  if (vol_a == 0.0 || vol_b == 0.0) return INFINITY;
  return cut / 2.0 / vol_a + cut / 2.0 / vol_b;
}

// Exact h1 by vertex enumeration: the infimum of ||Bᵀδ||_1 on the sphere is
// attained where m−1 projections vanish.
inline double h1_by_vertices(const MatrixXd& coords) {
  const Eigen::Index m = coords.rows(), n = coords.cols();
  double best = INFINITY;
  std::vector<int> pick(static_cast<std::size_t>(n), 0);
  std::fill(pick.begin(), pick.begin() + (m - 1), 1);
  std::sort(pick.begin(), pick.end());
  do {
    MatrixXd active(m - 1, m);
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (pick[static_cast<std::size_t>(j)]) active.row(r++) = coords.col(j).transpose();
    Eigen::JacobiSVD<MatrixXd> svd(active, Eigen::ComputeFullV);
    if (svd.singularValues()(m - 2) < 1e-12) continue;
    const VectorXd delta = svd.matrixV().col(m - 1);
    best = std::min(best, (coords.transpose() * delta).lpNorm<1>());
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}


// Exact optimum of min ||Dᵀc||_1 s.t. d_iᵀc = 1 for a full-row-rank D by
// vertex enumeration: some optimum has M−1 other columns orthogonal to c.
inline double l1_direction_by_vertices(const MatrixXd& d, Eigen::Index i) {
  const Eigen::Index m = d.rows(), n = d.cols();
  std::vector<Eigen::Index> others;
  for (Eigen::Index j = 0; j < n; ++j)
    if (j != i) others.push_back(j);
  double best = INFINITY;
  std::vector<int> pick(others.size(), 0);
  std::fill(pick.begin(), pick.begin() + (m - 1), 1);
  std::sort(pick.begin(), pick.end());
  do {
    MatrixXd sys(m, m);
    Eigen::Index r = 0;
    for (std::size_t t = 0; t < others.size(); ++t)
      if (pick[t]) sys.row(r++) = d.col(others[t]).transpose();
    sys.row(m - 1) = d.col(i).transpose();
    Eigen::FullPivLU<MatrixXd> lu(sys);
    if (!lu.isInvertible()) continue;
    VectorXd rhs = VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    const VectorXd c = lu.solve(rhs);
    best = std::min(best, (d.transpose() * c).lpNorm<1>());
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// Spearman rank correlation (no ties expected in tests).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j);
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx == 0 || syy == 0) ? 0.0 : sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
