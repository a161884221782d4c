#pragma once

#include <vector>

#include "ipursuit/datagen.hpp"
#include "ipursuit/linalg.hpp"

namespace ipursuit {

struct SolverConfig {
  double rho = 1.0;  // fixed augmented-Lagrangian penalty
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  int max_iters = 20000;
  bool reduce_to_span = true;
  // Every polish_every iterations the current iterate seeds a bounded run of
  // exact vertex pivots (reduced route only); a dual certificate ends the
  // solve. 0 disables.
  int polish_every = 100;

  void validate() const;
};

struct DirectionResult {
  Vector direction;
  double objective = 0.0;  // ||cᵀD||_1
  bool converged = false;
  int iterations = 0;
};

struct DirectionSet {
  Matrix directions;  // M x N, column i is the innovation direction of point i
  Vector objective_values;
  std::vector<bool> converged_flags;
  std::vector<int> iterations;

  bool all_converged() const;
};

// Solves   min ||cᵀD||_1  s.t.  cᵀd_i = 1   for any column i by ADMM on the
// split z = Dᵀc. The factorisation of D is computed once and shared
// (read-only) by every per-column solve.
//
// With reduce_to_span, c = X S⁻¹ y where D = X S Vᵀ is the thin SVD, so Dᵀc = V y
// and the c-update reduces to a projection onto the hyperplane v_iᵀy = 1.
// Otherwise the c-update uses the pseudo-inverse of the M x M Gram matrix DDᵀ.
// Both routes produce the same iterates in exact arithmetic.
class InnovationProblem {
 public:
  InnovationProblem(const Matrix& data, const SolverConfig& cfg);

  Index size() const noexcept { return n_; }
  Index rank() const noexcept { return rank_; }
  const SolverConfig& config() const noexcept { return cfg_; }

  DirectionResult solve(Index i) const;

 private:
  DirectionResult solve_reduced(Index i) const;
  DirectionResult solve_full(Index i) const;

  SolverConfig cfg_;
  Index m_ = 0, n_ = 0, rank_ = 0;
  // reduced route
  Matrix left_;       // X, M x r
  Vector sigma_;      // S
  Matrix right_;      // V, N x r
  // full route
  Matrix data_;       // D
  Matrix gram_pinv_;  // (DDᵀ)⁺
};

DirectionResult innovation_direction(const DataMatrix& d, Index i, const SolverConfig& cfg = {});

// Column-parallel (OpenMP) solve of every direction. Identical output to
// all_directions_serial for any thread count.
DirectionSet all_directions(const DataMatrix& d, const SolverConfig& cfg = {});
DirectionSet all_directions_serial(const DataMatrix& d, const SolverConfig& cfg = {});

}  // namespace ipursuit
