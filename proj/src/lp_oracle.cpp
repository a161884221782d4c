#include "ipursuit/lp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "ipursuit/error.hpp"

namespace ipursuit {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr int kReinvertEvery = 32;
constexpr double kRoundoffCost = 1e-7;
constexpr int kStallLimit = 50;
constexpr double kPerturb = 1e-7;

// Tableau layout: rows 0..m-1 are constraints, row m is the reduced-cost row;
// the last column is the right-hand side. The original constraints are kept so
// the tableau can be rebuilt from the current basis to shed roundoff.
class Tableau {
 public:
  Tableau(Matrix constraints, Vector rhs, Vector costs, std::vector<Index> basis)
      : orig_(std::move(constraints)),
        orig_rhs_(std::move(rhs)),
        m_(orig_.rows()),
        n_(orig_.cols()),
        basis_(std::move(basis)) {
    set_costs(std::move(costs));
  }

  void set_rhs(Vector rhs) {
    orig_rhs_ = std::move(rhs);
    reinvert();
  }

  void set_costs(Vector costs) {
    costs_ = std::move(costs);
    reinvert();
  }

  double& at(Index r, Index c) { return t_(r, c); }
  double rhs(Index r) const { return t_(r, n_); }
  double objective() const { return -t_(m_, n_); }
  const std::vector<Index>& basis() const { return basis_; }

  void pivot(Index row, Index col) {
    t_.row(row) /= t_(row, col);
    for (Index r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f != 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
    ++pivots_;
  }

  // Rebuilds B⁻¹[A | b] and the reduced costs from the original data.
  void reinvert() {
    Matrix bmat(m_, m_);
    Vector cb(m_);
    for (Index r = 0; r < m_; ++r) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      bmat.col(r) = orig_.col(j);
      cb(r) = costs_(j);
    }
    Eigen::PartialPivLU<Matrix> lu(bmat);
    t_.resize(m_ + 1, n_ + 1);
    t_.topLeftCorner(m_, n_) = lu.solve(orig_);
    t_.topRightCorner(m_, 1) = lu.solve(orig_rhs_);
    // Basic columns are exact unit vectors by construction.
    for (Index r = 0; r < m_; ++r) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      t_.col(j).head(m_).setZero();
      t_(r, j) = 1.0;
    }
    t_.row(m_).head(n_) = costs_.transpose() - cb.transpose() * t_.topLeftCorner(m_, n_);
    t_(m_, n_) = -cb.dot(t_.topRightCorner(m_, 1).col(0));
    for (Index r = 0; r < m_; ++r) t_(m_, basis_[static_cast<std::size_t>(r)]) = 0.0;
  }

  // Dantzig's rule over columns [0, usable), switching to Bland's rule after a
  // run of degenerate pivots so cycling cannot persist. Returns false if unbounded.
  bool optimise(Index usable) {
    int since = 0;
    int stalled = 0;
    // Columns whose tiny negative reduced cost is roundoff with no pivot row;
    // cleared after every pivot.
    std::vector<char> barred(static_cast<std::size_t>(usable), 0);
    for (;;) {
      const bool bland = stalled >= kStallLimit;
      Index enter = -1;
      double most = -kPivotEps;
      for (Index j = 0; j < usable; ++j)
        if (!barred[static_cast<std::size_t>(j)] && t_(m_, j) < most) {
          enter = j;
          if (bland) break;
          most = t_(m_, j);
        }
      if (enter < 0) {
        if (since == 0) return true;
        // Confirm optimality on a freshly rebuilt tableau.
        reinvert();
        since = 0;
        std::fill(barred.begin(), barred.end(), 0);
        continue;
      }
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < m_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = std::max(0.0, t_(r, n_)) / a;
        if (ratio < best - kPivotEps ||
            (ratio <= best + kPivotEps && leave >= 0 &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) {
        if (since > 0) {
          reinvert();
          since = 0;
          continue;
        }
        if (t_(m_, enter) > -kRoundoffCost) {
          barred[static_cast<std::size_t>(enter)] = 1;
          continue;
        }
        return false;
      }
      const double before = objective();
      pivot(leave, enter);
      stalled = objective() < before - kPivotEps ? 0 : stalled + 1;
      std::fill(barred.begin(), barred.end(), 0);
      if (++since % kReinvertEvery == 0) reinvert();
    }
  }

  int pivots() const { return pivots_; }

 private:
  Matrix orig_;
  Vector orig_rhs_;
  Vector costs_;
  Matrix t_;
  Index m_, n_;
  std::vector<Index> basis_;
  int pivots_ = 0;
};

// With `perturb`, every right-hand side is raised by a distinct tiny amount so
// degenerate vertices do not stall the pivoting; the true b is restored on the
// final basis. Returns nullopt when that basis is not feasible for the true b.
std::optional<LpSolution> solve_impl(const Matrix& a, const Vector& b, const Vector& c, bool perturb) {
  const Index m = a.rows(), n = a.cols();
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();

  // Phase I: one artificial per row, minimise their sum.
  Matrix aug = Matrix::Zero(m, n + m);
  Vector rhs(m);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    const double sign = b(r) < 0 ? -1.0 : 1.0;
    aug.row(r).head(n) = sign * a.row(r);
    rhs(r) = sign * b(r);
    aug(r, n + r) = 1.0;
    basis[static_cast<std::size_t>(r)] = n + r;
  }
  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  Vector shifted = rhs;
  if (perturb)
    for (Index r = 0; r < m; ++r)
      shifted(r) += kPerturb * scale * (1.0 + std::fmod(0.6180339887 * static_cast<double>(r + 1), 1.0));
  Tableau tab(std::move(aug), shifted, std::move(phase1), std::move(basis));
  tab.optimise(n + m);

  LpSolution out;
  if (tab.objective() > 1e-9 * scale) {
    if (perturb) return std::nullopt;
    out.status = LpStatus::Infeasible;
    out.pivots = tab.pivots();
    return out;
  }

  // Drive remaining artificials out of the basis on the largest available
  // pivot; rows where that is impossible are redundant and keep a zero artificial.
  for (Index r = 0; r < m; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < n) continue;
    Index col = -1;
    double big = 1e-7;
    for (Index j = 0; j < n; ++j)
      if (std::abs(tab.at(r, j)) > big) {
        big = std::abs(tab.at(r, j));
        col = j;
      }
    if (col >= 0) tab.pivot(r, col);
  }

  // Phase II: true objective, artificials barred from entering.
  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = c;
  tab.set_costs(std::move(phase2));
  if (!tab.optimise(n)) {
    out.status = LpStatus::Unbounded;
    out.pivots = tab.pivots();
    return out;
  }
  if (perturb) {
    tab.set_rhs(rhs);
    for (Index r = 0; r < m; ++r)
      if (tab.rhs(r) < -1e-9 * scale) return std::nullopt;
    if (!tab.optimise(n)) return std::nullopt;
  }

  out.x = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) {
    const Index bj = tab.basis()[static_cast<std::size_t>(r)];
    if (bj < n) out.x(bj) = tab.rhs(r);
  }
  out.objective = c.dot(out.x);
  out.pivots = tab.pivots();
  return out;
}

}  // namespace

LpSolution solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c) {
  if (b.size() != a.rows() || c.size() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "LP dimensions disagree");
  if (auto sol = solve_impl(a, b, c, true)) return *sol;
  return *solve_impl(a, b, c, false);
}

OracleResult lp_oracle(const DataMatrix& d, Index i) {
  const Index M = d.ambient_dim(), N = d.size();
  if (N > 200 || M > 50) throw Error(ErrorCode::TooLarge, "lp_oracle is limited to N <= 200 and M <= 50");
  if (N == 0) throw Error(ErrorCode::EmptyMatrix, "data matrix is empty");
  if (i < 0 || i >= N) throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(i), i);
  require_finite(d.points, "data");

  // Variable order: c+ (M), c- (M), u (N), v (N).
  const Index nv = 2 * M + 2 * N;
  Matrix a = Matrix::Zero(N + 1, nv);
  Vector b = Vector::Zero(N + 1);
  Vector cost = Vector::Zero(nv);
  const Matrix dt = d.points.transpose();
  a.block(0, 0, N, M) = dt;
  a.block(0, M, N, M) = -dt;
  a.block(0, 2 * M, N, N) = -Matrix::Identity(N, N);
  a.block(0, 2 * M + N, N, N) = Matrix::Identity(N, N);
  a.block(N, 0, 1, M) = d.points.col(i).transpose();
  a.block(N, M, 1, M) = -d.points.col(i).transpose();
  b(N) = 1.0;
  cost.tail(2 * N).setOnes();

  const LpSolution sol = solve_standard_lp(a, b, cost);
  // c = d_i / ||d_i||^2 is always feasible and the objective is bounded below by 0.
  if (sol.status != LpStatus::Optimal) throw Error(ErrorCode::Infeasible, std::string("simplex failed on a feasible LP: ") + (sol.status == LpStatus::Infeasible ? "phase I" : "unbounded"));
  OracleResult out;
  out.direction = sol.x.head(M) - sol.x.segment(M, M);
  out.objective = (d.points.transpose() * out.direction).lpNorm<1>();
  return out;
}

}  // namespace ipursuit
