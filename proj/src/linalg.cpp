#include "ipursuit/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ipursuit/error.hpp"

namespace ipursuit {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

OrthonormalBasis OrthonormalBasis::adopt(Matrix q, double tol) {
  require_finite(q, "basis");
  const Matrix gram = q.transpose() * q;
  const Matrix eye = Matrix::Identity(q.cols(), q.cols());
  if (q.cols() > 0 && (gram - eye).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::NotOrthogonal, "columns are not orthonormal");
  return OrthonormalBasis(std::move(q), Trusted{});
}

namespace {

void normalise_signs(Matrix& q) {
  for (Index j = 0; j < q.cols(); ++j) {
    Index imax = 0;
    q.col(j).cwiseAbs().maxCoeff(&imax);
    if (q(imax, j) < 0) q.col(j) = -q.col(j);
  }
}

}  // namespace

Index ThinSvd::rank() const {
  if (singular_values.size() == 0 || singular_values(0) <= 0.0) return 0;
  const double cutoff = kRankTolerance * singular_values(0);
  Index r = 0;
  while (r < singular_values.size() && singular_values(r) > cutoff) ++r;
  return r;
}

ThinSvd thin_svd(const Matrix& a) {
  if (a.size() == 0) throw Error(ErrorCode::EmptyMatrix, "thin_svd of empty matrix");
  require_finite(a, "matrix");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ThinSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

OrthonormalBasis orthonormal_basis(const Matrix& a) {
  if (a.cols() == 0) throw Error(ErrorCode::EmptyMatrix, "orthonormal_basis needs at least one column");
  require_finite(a, "matrix");
  if (a.rows() == 0) return OrthonormalBasis(0);
  ThinSvd svd = thin_svd(a);
  Matrix q = svd.u.leftCols(svd.rank());
  normalise_signs(q);
  return OrthonormalBasis(std::move(q), OrthonormalBasis::Trusted{});
}

OrthonormalBasis direct_sum(std::span<const OrthonormalBasis> parts, Index ambient_dim) {
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.ambient_dim() != ambient_dim) throw Error(ErrorCode::DimensionMismatch, "direct_sum ambient dims differ");
    cols += p.dim();
  }
  if (cols == 0) return OrthonormalBasis(ambient_dim);
  Matrix stacked(ambient_dim, cols);
  Index at = 0;
  for (const auto& p : parts) {
    stacked.middleCols(at, p.dim()) = p.matrix();
    at += p.dim();
  }
  return orthonormal_basis(stacked);
}

Vector principal_angle_cosines(const OrthonormalBasis& a, const OrthonormalBasis& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw Error(ErrorCode::DimensionMismatch, "principal angles need a common ambient space");
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidDim, "principal angles need non-empty subspaces");
  const Matrix cross = a.matrix().transpose() * b.matrix();
  Eigen::JacobiSVD<Matrix> svd(cross);
  Vector s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) s(i) = std::clamp(s(i), 0.0, 1.0);
  return s;
}

double aff_inf(const OrthonormalBasis& a, const OrthonormalBasis& b) { return principal_angle_cosines(a, b)(0); }

double aff_inf(const Vector& unit, const OrthonormalBasis& b) {
  if (unit.size() != b.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "vector/subspace dims differ");
  if (b.empty()) return 0.0;
  return std::min(1.0, (b.matrix().transpose() * unit).norm() / unit.norm());
}

double aff_rms(const OrthonormalBasis& a, const OrthonormalBasis& b) {
  const Vector c = principal_angle_cosines(a, b);
  return std::sqrt(c.squaredNorm() / static_cast<double>(c.size()));
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

OrthonormalBasis sample_grassmannian(Index ambient_dim, Index dim, Rng& rng) {
  if (dim < 0 || ambient_dim < 1 || dim > ambient_dim)
    throw Error(ErrorCode::InvalidDim, "need 0 <= d <= M");
  if (dim == 0) return OrthonormalBasis(ambient_dim);
  for (;;) {
    // A Gaussian matrix has full column rank with probability one; the loop
    // only guards against the measure-zero event.
    const Matrix g = gaussian_matrix(ambient_dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const Vector r_diag = qr.matrixQR().diagonal().cwiseAbs();
    if (r_diag.minCoeff() <= kRankTolerance * r_diag.maxCoeff()) continue;
    Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, dim);
    return OrthonormalBasis(std::move(q), OrthonormalBasis::Trusted{});
  }
}

Vector sample_unit_sphere(Index dim, Rng& rng) {
  if (dim < 1) throw Error(ErrorCode::InvalidDim, "sphere dimension must be >= 1");
  for (;;) {
    Vector g(dim);
    for (Index i = 0; i < dim; ++i) g(i) = rng.normal();
    const double n = g.norm();
    if (n > 0.0) return g / n;
  }
}

}  // namespace ipursuit
