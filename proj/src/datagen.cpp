#include "ipursuit/datagen.hpp"

#include <string>

#include "ipursuit/error.hpp"

namespace ipursuit {

Matrix SubspaceEnsemble::cluster_basis(Index k) const {
  const OrthonormalBasis& inn = innovations.at(static_cast<std::size_t>(k));
  Matrix b(ambient_dim(), intersection.dim() + inn.dim());
  b << intersection.matrix(), inn.matrix();
  return b;
}

OrthonormalBasis SubspaceEnsemble::others_span(Index k) const {
  if (num_clusters() < 2) return OrthonormalBasis(ambient_dim());
  std::vector<OrthonormalBasis> parts;
  if (!intersection.empty()) parts.push_back(intersection);
  for (Index i = 0; i < num_clusters(); ++i)
    if (i != k) parts.push_back(innovations[i]);
  return direct_sum(parts, ambient_dim());
}

OrthonormalBasis SubspaceEnsemble::others_innovation(Index k) const {
  std::vector<OrthonormalBasis> parts;
  for (Index i = 0; i < num_clusters(); ++i)
    if (i != k) parts.push_back(innovations[i]);
  return direct_sum(parts, ambient_dim());
}

Matrix DataMatrix::cluster(int k) const {
  if (!labels) throw Error(ErrorCode::MissingLabels, "data has no labels");
  std::vector<Index> cols;
  for (std::size_t i = 0; i < labels->size(); ++i)
    if ((*labels)[i] == k) cols.push_back(static_cast<Index>(i));
  Matrix out(points.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = points.col(cols[j]);
  return out;
}

void normalize_columns(Matrix& points) {
  for (Index j = 0; j < points.cols(); ++j) {
    const double n = points.col(j).norm();
    if (n < 1e-12) throw Error(ErrorCode::DegeneratePoint, "zero column " + std::to_string(j), j);
    points.col(j) /= n;
  }
}

SubspaceEnsemble make_ensemble_fully_random(Index ambient_dim, Index clusters, Index cluster_dim,
                                            Index intersection_dim, Rng& rng) {
  const Index m = cluster_dim, s = intersection_dim, M = ambient_dim, K = clusters;
  if (K < 1 || s < 0 || s >= m || m > M || K * (m - s) + s > M)
    throw Error(ErrorCode::InvalidDims, "need 0 <= s < m <= M, K >= 1 and K(m-s)+s <= M");
  SubspaceEnsemble ens{sample_grassmannian(M, s, rng), {}};
  ens.innovations.reserve(static_cast<std::size_t>(K));
  const Matrix& u = ens.intersection.matrix();
  for (Index k = 0; k < K; ++k) {
    // Uniform draw on the Grassmannian of the complement of span(U).
    for (;;) {
      Matrix g = gaussian_matrix(M, m - s, rng);
      if (s > 0) g -= u * (u.transpose() * g);
      // Second pass keeps U-leakage at rounding level.
      if (s > 0) g -= u * (u.transpose() * g);
      OrthonormalBasis b = orthonormal_basis(g);
      if (b.dim() == m - s) {
        ens.innovations.push_back(std::move(b));
        break;
      }
    }
  }
  return ens;
}

SubspaceEnsemble make_ensemble_deterministic(const Matrix& intersection, const std::vector<Matrix>& innovations) {
  if (innovations.empty()) throw Error(ErrorCode::InvalidDims, "need at least one innovation block");
  const Index M = intersection.rows();
  SubspaceEnsemble ens{OrthonormalBasis(M), {}};
  if (intersection.cols() > 0) {
    ens.intersection = orthonormal_basis(intersection);
    if (ens.intersection.dim() != intersection.cols())
      throw Error(ErrorCode::RankDeficient, "intersection block loses rank");
  }
  for (std::size_t k = 0; k < innovations.size(); ++k) {
    const Matrix& blk = innovations[k];
    if (blk.rows() != M) throw Error(ErrorCode::DimensionMismatch, "innovation block has wrong ambient dim");
    OrthonormalBasis b = orthonormal_basis(blk);
    if (b.dim() != blk.cols())
      throw Error(ErrorCode::RankDeficient, "innovation block " + std::to_string(k) + " loses rank",
                  static_cast<std::ptrdiff_t>(k));
    if (!ens.intersection.empty() &&
        (ens.intersection.matrix().transpose() * b.matrix()).cwiseAbs().maxCoeff() > 1e-8)
      throw Error(ErrorCode::NotOrthogonal, "innovation block " + std::to_string(k) + " overlaps span(U)",
                  static_cast<std::ptrdiff_t>(k));
    ens.innovations.push_back(std::move(b));
  }
  return ens;
}

DataMatrix sample_points(const SubspaceEnsemble& ens, Index n_per_cluster, Rng& rng) {
  return sample_points(ens, std::vector<Index>(static_cast<std::size_t>(ens.num_clusters()), n_per_cluster), rng);
}

DataMatrix sample_points(const SubspaceEnsemble& ens, const std::vector<Index>& cluster_sizes, Rng& rng) {
  if (static_cast<Index>(cluster_sizes.size()) != ens.num_clusters())
    throw Error(ErrorCode::LengthMismatch, "one cluster size per cluster");
  Index total = 0;
  for (Index n : cluster_sizes) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "each cluster needs at least one point");
    total += n;
  }
  DataMatrix d{Matrix(ens.ambient_dim(), total), Labels{}};
  d.labels->reserve(static_cast<std::size_t>(total));
  Index col = 0;
  for (Index k = 0; k < ens.num_clusters(); ++k) {
    const Matrix basis = ens.cluster_basis(k);
    for (Index i = 0; i < cluster_sizes[static_cast<std::size_t>(k)]; ++i, ++col) {
      d.points.col(col) = basis * sample_unit_sphere(basis.cols(), rng);
      d.labels->push_back(static_cast<int>(k));
    }
  }
  // [U, Û_k] is orthonormal so the norm is already 1 up to rounding.
  normalize_columns(d.points);
  return d;
}

DataMatrix sample_points_deterministic(const SubspaceEnsemble& ens, const std::vector<Matrix>& coefficients) {
  if (static_cast<Index>(coefficients.size()) != ens.num_clusters())
    throw Error(ErrorCode::LengthMismatch, "one coefficient block per cluster");
  Index total = 0;
  for (Index k = 0; k < ens.num_clusters(); ++k) {
    if (coefficients[k].rows() != ens.cluster_dim(k))
      throw Error(ErrorCode::DimensionMismatch, "coefficient block " + std::to_string(k) + " needs m_k rows");
    total += coefficients[k].cols();
  }
  DataMatrix d{Matrix(ens.ambient_dim(), total), Labels{}};
  Index col = 0;
  for (Index k = 0; k < ens.num_clusters(); ++k) {
    const Matrix basis = ens.cluster_basis(k);
    for (Index i = 0; i < coefficients[k].cols(); ++i, ++col) {
      const double n = coefficients[k].col(i).norm();
      if (n < 1e-12) throw Error(ErrorCode::ZeroCoefficient, "zero coefficient column", col);
      d.points.col(col) = basis * (coefficients[k].col(i) / n);
      d.labels->push_back(static_cast<int>(k));
    }
  }
  normalize_columns(d.points);
  return d;
}

}  // namespace ipursuit
