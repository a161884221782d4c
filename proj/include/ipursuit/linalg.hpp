#pragma once

#include <span>

#include <Eigen/Dense>

#include "ipursuit/rng.hpp"

namespace ipursuit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative singular-value cutoff used for every numerical-rank decision.
inline constexpr double kRankTolerance = 1e-10;

void require_finite(const Matrix& a, const char* what);

// An M x d matrix with orthonormal columns. d may be zero.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(Index ambient_dim = 0) : basis_(ambient_dim, 0) {}

  // Adopts `q` as-is after checking qᵀq = I within `tol`; throws NotOrthogonal.
  static OrthonormalBasis adopt(Matrix q, double tol = 1e-10);

  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index dim() const noexcept { return basis_.cols(); }
  bool empty() const noexcept { return basis_.cols() == 0; }
  const Matrix& matrix() const noexcept { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  Vector coordinates(const Vector& x) const { return basis_.transpose() * x; }
  Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }

 private:
  struct Trusted {};
  OrthonormalBasis(Matrix q, Trusted) : basis_(std::move(q)) {}
  friend OrthonormalBasis orthonormal_basis(const Matrix& a);
  friend OrthonormalBasis sample_grassmannian(Index ambient_dim, Index dim, Rng& rng);

  Matrix basis_;
};

// Orthonormal basis of the column space of `a`; dimension is the numerical
// rank. Each column is sign-normalised so its largest-magnitude entry is positive.
OrthonormalBasis orthonormal_basis(const Matrix& a);

// Basis for the direct sum of the given subspaces (all must share ambient_dim).
OrthonormalBasis direct_sum(std::span<const OrthonormalBasis> parts, Index ambient_dim);

// Singular values of AᵀB clamped to [0, 1], descending, length min(dim A, dim B).
Vector principal_angle_cosines(const OrthonormalBasis& a, const OrthonormalBasis& b);

// Cosine of the smallest principal angle.
double aff_inf(const OrthonormalBasis& a, const OrthonormalBasis& b);
// Same, for a unit vector against a subspace: the projection norm.
double aff_inf(const Vector& unit, const OrthonormalBasis& b);

double aff_rms(const OrthonormalBasis& a, const OrthonormalBasis& b);

OrthonormalBasis sample_grassmannian(Index ambient_dim, Index dim, Rng& rng);

Vector sample_unit_sphere(Index dim, Rng& rng);

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

struct ThinSvd {
  Matrix u;
  Vector singular_values;  // descending
  Matrix v;

  // Number of singular values above kRankTolerance * largest.
  Index rank() const;
};

ThinSvd thin_svd(const Matrix& a);

}  // namespace ipursuit
