#include "ipursuit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "ipursuit/error.hpp"

namespace ipursuit {

void SolverConfig::validate() const {
  if (!(rho > 0.0) || !(primal_tol > 0.0) || !(dual_tol > 0.0) || max_iters < 1 || polish_every < 0)
    throw Error(ErrorCode::InvalidArgument,
                "solver config needs rho, tolerances > 0, max_iters >= 1 and polish_every >= 0");
}

bool DirectionSet::all_converged() const {
  for (bool c : converged_flags)
    if (!c) return false;
  return true;
}

InnovationProblem::InnovationProblem(const Matrix& data, const SolverConfig& cfg)
    : cfg_(cfg), m_(data.rows()), n_(data.cols()) {
  cfg_.validate();
  if (data.size() == 0) throw Error(ErrorCode::EmptyMatrix, "data matrix is empty");
  require_finite(data, "data");
  if (cfg_.reduce_to_span) {
    ThinSvd svd = thin_svd(data);
    rank_ = svd.rank();
    left_ = svd.u.leftCols(rank_);
    sigma_ = svd.singular_values.head(rank_);
    right_ = svd.v.leftCols(rank_);
  } else {
    data_ = data;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(data * data.transpose());
    const Vector& ev = eig.eigenvalues();
    const double top = ev.maxCoeff();
    // Eigenvalues of DDᵀ carry roundoff near 1e-16·top, so a squared singular
    // value cutoff would invert noise. Cut the eigenvalues themselves instead.
    const double cutoff = kRankTolerance * top;
    Vector inv = Vector::Zero(ev.size());
    for (Index j = 0; j < ev.size(); ++j)
      if (ev(j) > cutoff) {
        inv(j) = 1.0 / ev(j);
        ++rank_;
      }
    gram_pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  }
}

namespace {

inline double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

constexpr double kDualTol = 1e-9;
constexpr double kIndependence = 1e-8;

constexpr int kProjectionRounds = 60;

// Dual certificate for a degenerate vertex, where more than r−1 rows of Vy
// vanish and a single basis cannot exhibit the multipliers. Looks for w on the
// zero set Z with |w| <= 1 and V_Zᵀw = ||Vy||_1 a − V_Sᵀ sign(Vy)_S by
// alternating projections between that affine set and the unit box, seeded
// with the ADMM multiplier.
bool certify_degenerate(const Matrix& v, const Vector& a, const Vector& s, double tiny, const Vector& w0) {
  const Index n = v.rows(), r = v.cols();
  std::vector<Index> zero;
  Vector b = s.lpNorm<1>() * a;
  for (Index j = 0; j < n; ++j) {
    if (std::abs(s(j)) <= tiny)
      zero.push_back(j);
    else
      b -= (s(j) > 0 ? 1.0 : -1.0) * v.row(j).transpose();
  }
  const Index nz = static_cast<Index>(zero.size());
  if (nz < r) return false;
  Matrix at(r, nz);
  Vector w(nz);
  for (Index t = 0; t < nz; ++t) {
    at.col(t) = v.row(zero[static_cast<std::size_t>(t)]).transpose();
    w(t) = std::clamp(w0(zero[static_cast<std::size_t>(t)]), -1.0, 1.0);
  }
  const Eigen::LDLT<Matrix> gram(at * at.transpose());
  const double scale = 1.0 + b.norm();
  for (int round = 0; round < kProjectionRounds; ++round) {
    w += at.transpose() * gram.solve(b - at * w);
    if ((at * w - b).norm() > 1e-9 * scale) return false;
    if (w.cwiseAbs().maxCoeff() <= 1.0 + kDualTol) return true;
    w = w.cwiseMax(-1.0).cwiseMin(1.0);
  }
  return false;
}

// Exact finish from an ADMM iterate. A vertex of  min ||Vy||_1 s.t. aᵀy = 1  is
// fixed by r−1 rows of V with V_j y = 0; with aᵀ they form the nonsingular
// r x r matrix M. The duals solve Mᵀ[w_A; −λ] = −V_Sᵀ sign(Vy)_S, and any w
// with |w| <= 1 and Vᵀw = λa gives ||Vy'||_1 >= wᵀVy' = λ for feasible y', so
// |w_A| <= 1 certifies optimality. Otherwise releasing row k with |w_k| > 1 is
// a descent edge with slope 1 − |w_k|, searched exactly over its breakpoints.
std::optional<Vector> crossover(const Matrix& v, const Vector& a, const Vector& y0, const Vector& w0, int max_pivots) {
  const Index n = v.rows(), r = v.cols();
  if (r == 1) return Vector::Constant(1, 1.0 / a(0));

  // Start vertex: the rows with the smallest |V_j y0| that are independent of
  // a and of each other.
  const Vector s0 = (v * y0).cwiseAbs();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return s0(x) < s0(y); });
  Matrix q(r, r);
  Index qn = 0;
  q.col(qn++) = a.normalized();
  std::vector<Index> active;
  for (Index j : order) {
    if (qn == r) break;
    Vector x = v.row(j).transpose();
    const double nx = x.norm();
    if (nx == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) x -= q.leftCols(qn) * (q.leftCols(qn).transpose() * x);
    const double res = x.norm();
    if (res <= kIndependence * nx) continue;
    q.col(qn++) = x / res;
    active.push_back(j);
  }
  if (qn < r) return std::nullopt;
  std::vector<char> is_active(static_cast<std::size_t>(n), 0);
  for (Index j : active) is_active[static_cast<std::size_t>(j)] = 1;

  Matrix m(r, r);
  struct Breakpoint {
    double t;
    Index j;
  };
  std::vector<Breakpoint> breaks;
  // The degenerate certificate is tried once per objective level.
  double last_objective = std::numeric_limits<double>::infinity();
  for (int pivot = 0; pivot <= max_pivots; ++pivot) {
    for (Index t = 0; t < r - 1; ++t) m.row(t) = v.row(active[static_cast<std::size_t>(t)]);
    m.row(r - 1) = a.transpose();
    const Eigen::PartialPivLU<Matrix> lu(m);
    const Vector y = lu.solve(Vector::Unit(r, r - 1));
    const Vector s = v * y;
    const double tiny = 1e-12 * s.cwiseAbs().maxCoeff();

    Vector rhs = Vector::Zero(r);
    for (Index j = 0; j < n; ++j)
      if (!is_active[static_cast<std::size_t>(j)] && std::abs(s(j)) > tiny)
        rhs -= (s(j) > 0 ? 1.0 : -1.0) * v.row(j).transpose();
    const Vector dual = lu.transpose().solve(rhs);
    Index k = -1;
    double worst = 1.0 + kDualTol;
    for (Index t = 0; t < r - 1; ++t)
      if (std::abs(dual(t)) > worst) {
        worst = std::abs(dual(t));
        k = t;
      }
    if (k < 0) return y;
    const double objective = s.lpNorm<1>();
    if (objective < last_objective * (1.0 - 1e-14) && certify_degenerate(v, a, s, tiny, w0)) return y;
    last_objective = std::min(last_objective, objective);

    const Index leaving = active[static_cast<std::size_t>(k)];
    const Vector d = (dual(k) > 0 ? 1.0 : -1.0) * lu.solve(Vector::Unit(r, k));
    const Vector g = v * d;
    double slope = 0.0;
    Index degenerate = -1;
    breaks.clear();
    for (Index j = 0; j < n; ++j) {
      if (is_active[static_cast<std::size_t>(j)] && j != leaving) continue;
      if (j == leaving || std::abs(s(j)) <= tiny) {
        slope += std::abs(g(j));
        if (j != leaving && std::abs(g(j)) > 0.0 &&
            (degenerate < 0 || std::abs(g(j)) > std::abs(g(degenerate))))
          degenerate = j;
        continue;
      }
      slope += (s(j) > 0 ? 1.0 : -1.0) * g(j);
      if (s(j) * g(j) < 0.0) breaks.push_back({-s(j) / g(j), j});
    }
    Index entering = -1;
    if (slope >= 0.0) {
      // Blocked at t = 0 by a zero off the active set: swap it in.
      entering = degenerate;
    } else {
      std::sort(breaks.begin(), breaks.end(),
                [](const Breakpoint& x, const Breakpoint& y) { return x.t < y.t || (x.t == y.t && x.j < y.j); });
      for (const Breakpoint& b : breaks) {
        slope += 2.0 * std::abs(g(b.j));
        if (slope >= 0.0) {
          entering = b.j;
          break;
        }
      }
    }
    if (entering < 0) return std::nullopt;
    is_active[static_cast<std::size_t>(leaving)] = 0;
    is_active[static_cast<std::size_t>(entering)] = 1;
    active[static_cast<std::size_t>(k)] = entering;
  }
  return std::nullopt;
}

}  // namespace

DirectionResult InnovationProblem::solve(Index i) const {
  if (i < 0 || i >= n_) throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(i), i);
  return cfg_.reduce_to_span ? solve_reduced(i) : solve_full(i);
}

DirectionResult InnovationProblem::solve_reduced(Index i) const {
  const Matrix& v = right_;
  const Vector vi = v.row(i).transpose();
  const double vi_sq = vi.squaredNorm();
  if (vi_sq <= 0.0) throw Error(ErrorCode::DegeneratePoint, "point has no component in span(D)", i);

  const double thresh = 1.0 / cfg_.rho;
  const double primal_bound = cfg_.primal_tol * std::sqrt(static_cast<double>(n_));
  const double dual_bound = cfg_.dual_tol * std::sqrt(static_cast<double>(n_));

  // Feasible start: minimum-norm y with v_iᵀy = 1.
  Vector y = vi / vi_sq;
  Vector vy = v * y;
  Vector z = vy;
  Vector u = Vector::Zero(n_);
  // Vᵀz and Vᵀu are tracked incrementally (VᵀV = I), one GEMV saved per step.
  Vector vt_z = v.transpose() * z;
  Vector vt_u = Vector::Zero(rank_);
  Vector vt_z_new(rank_);

  DirectionResult out;
  int it = 0;
  for (; it < cfg_.max_iters; ++it) {
    y = vt_z - vt_u;
    y += ((1.0 - vi.dot(y)) / vi_sq) * vi;
    vy.noalias() = v * y;

    double primal_sq = 0.0;
    for (Index j = 0; j < n_; ++j) {
      const double zj = soft(vy(j) + u(j), thresh);
      const double r = vy(j) - zj;
      u(j) += r;
      z(j) = zj;
      primal_sq += r * r;
    }
    vt_z_new.noalias() = v.transpose() * z;
    vt_u += y - vt_z_new;
    const double dual = cfg_.rho * (vt_z_new - vt_z).norm();
    vt_z.swap(vt_z_new);
    if (std::sqrt(primal_sq) <= primal_bound && dual <= dual_bound) {
      out.converged = true;
      ++it;
      break;
    }
    if (cfg_.polish_every > 0 && (it + 1) % cfg_.polish_every == 0) {
      if (auto vertex = crossover(v, vi, y, cfg_.rho * u, static_cast<int>(2 * rank_))) {
        y = std::move(*vertex);
        vy.noalias() = v * y;
        out.converged = true;
        ++it;
        break;
      }
    }
  }
  out.iterations = it;
  out.objective = vy.lpNorm<1>();
  out.direction = left_ * y.cwiseQuotient(sigma_);
  return out;
}

DirectionResult InnovationProblem::solve_full(Index i) const {
  const Matrix& d = data_;
  const Vector di = d.col(i);
  const Vector gi = gram_pinv_ * di;
  const double di_gi = di.dot(gi);
  if (di_gi <= 0.0) throw Error(ErrorCode::DegeneratePoint, "point has no component in span(D)", i);

  const double thresh = 1.0 / cfg_.rho;
  const double primal_bound = cfg_.primal_tol * std::sqrt(static_cast<double>(n_));
  const double dual_bound = cfg_.dual_tol * std::sqrt(static_cast<double>(n_));

  Vector c = gi / di_gi;
  Vector dc = d.transpose() * c;
  Vector z = dc;
  Vector u = Vector::Zero(n_);
  Vector z_old(n_);
  Vector dz(m_);

  DirectionResult out;
  int it = 0;
  for (; it < cfg_.max_iters; ++it) {
    c.noalias() = gram_pinv_ * (d * (z - u));
    c += ((1.0 - di.dot(c)) / di_gi) * gi;
    dc.noalias() = d.transpose() * c;

    z_old = z;
    double primal_sq = 0.0;
    for (Index j = 0; j < n_; ++j) {
      const double zj = soft(dc(j) + u(j), thresh);
      const double r = dc(j) - zj;
      u(j) += r;
      z(j) = zj;
      primal_sq += r * r;
    }
    // Dual residual measured in the same metric as the reduced route: ||Vᵀ Δz||.
    dz.noalias() = d * (z - z_old);
    const double dual = cfg_.rho * std::sqrt(std::max(0.0, dz.dot(gram_pinv_ * dz)));
    if (std::sqrt(primal_sq) <= primal_bound && dual <= dual_bound) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.objective = dc.lpNorm<1>();
  out.direction = c;
  return out;
}

DirectionResult innovation_direction(const DataMatrix& d, Index i, const SolverConfig& cfg) {
  if (i < 0 || i >= d.size()) throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(i), i);
  return InnovationProblem(d.points, cfg).solve(i);
}

namespace {

DirectionSet make_set(Index m, Index n) {
  DirectionSet out;
  out.directions = Matrix::Zero(m, n);
  out.objective_values = Vector::Zero(n);
  out.converged_flags.assign(static_cast<std::size_t>(n), false);
  out.iterations.assign(static_cast<std::size_t>(n), 0);
  return out;
}

void store(DirectionSet& set, Index i, DirectionResult r) {
  set.directions.col(i) = r.direction;
  set.objective_values(i) = r.objective;
  set.converged_flags[static_cast<std::size_t>(i)] = r.converged;
  set.iterations[static_cast<std::size_t>(i)] = r.iterations;
}

}  // namespace

DirectionSet all_directions(const DataMatrix& d, const SolverConfig& cfg) {
  const InnovationProblem problem(d.points, cfg);
  DirectionSet out = make_set(d.ambient_dim(), d.size());
  const Index n = d.size();
  // std::vector<bool> is not safe for concurrent writes; stage flags as chars.
  std::vector<char> flags(static_cast<std::size_t>(n), 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index i = 0; i < n; ++i) {
    try {
      DirectionResult r = problem.solve(i);
      flags[static_cast<std::size_t>(i)] = r.converged ? 1 : 0;
      out.directions.col(i) = r.direction;
      out.objective_values(i) = r.objective;
      out.iterations[static_cast<std::size_t>(i)] = r.iterations;
    } catch (...) {
#pragma omp critical(ipursuit_directions_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (Index i = 0; i < n; ++i) out.converged_flags[static_cast<std::size_t>(i)] = flags[static_cast<std::size_t>(i)] != 0;
  return out;
}

DirectionSet all_directions_serial(const DataMatrix& d, const SolverConfig& cfg) {
  const InnovationProblem problem(d.points, cfg);
  DirectionSet out = make_set(d.ambient_dim(), d.size());
  for (Index i = 0; i < d.size(); ++i) store(out, i, problem.solve(i));
  return out;
}

}  // namespace ipursuit
