#pragma once

#include "ipursuit/datagen.hpp"
#include "ipursuit/linalg.hpp"

namespace ipursuit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule:
//   min cᵀx  s.t.  Ax = b, x >= 0.
// Meant for small reference problems, not for speed.
LpSolution solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c);

struct OracleResult {
  Vector direction;
  double objective = 0.0;
};

// Exact optimum of  min ||cᵀD||_1  s.t.  cᵀd_i = 1, posed as the LP
//   min Σ(u+v)  s.t.  Dᵀc = u - v,  d_iᵀc = 1,  u, v >= 0,  c free.
// Refuses N > 200 or M > 50 with TooLarge.
OracleResult lp_oracle(const DataMatrix& d, Index i);

}  // namespace ipursuit
