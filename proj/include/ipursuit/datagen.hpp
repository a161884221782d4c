#pragma once

#include <optional>
#include <vector>

#include "ipursuit/linalg.hpp"

namespace ipursuit {

using Labels = std::vector<int>;

// Union-of-subspaces model: cluster k spans [U, Û_k] where U (dim s) is the
// shared intersection and every Û_k is orthogonal to U.
struct SubspaceEnsemble {
  OrthonormalBasis intersection;
  std::vector<OrthonormalBasis> innovations;

  Index ambient_dim() const noexcept { return intersection.ambient_dim(); }
  Index num_clusters() const noexcept { return static_cast<Index>(innovations.size()); }
  Index intersection_dim() const noexcept { return intersection.dim(); }
  Index cluster_dim(Index k) const { return intersection.dim() + innovations[k].dim(); }

  // [U, Û_k]
  Matrix cluster_basis(Index k) const;
  // Orthonormal basis of the direct sum of every cluster span except k.
  OrthonormalBasis others_span(Index k) const;
  // Orthonormal basis of the direct sum of every innovation except k.
  OrthonormalBasis others_innovation(Index k) const;
};

// Columns are points and have unit l2 norm.
struct DataMatrix {
  Matrix points;
  std::optional<Labels> labels;

  Index ambient_dim() const noexcept { return points.rows(); }
  Index size() const noexcept { return points.cols(); }

  // Points carrying label k, in column order.
  Matrix cluster(int k) const;
};

// Scales every column to unit norm; throws DegeneratePoint on a zero column.
void normalize_columns(Matrix& points);

SubspaceEnsemble make_ensemble_fully_random(Index ambient_dim, Index clusters, Index cluster_dim,
                                            Index intersection_dim, Rng& rng);

// Orthonormalises the supplied blocks and validates the model.
SubspaceEnsemble make_ensemble_deterministic(const Matrix& intersection, const std::vector<Matrix>& innovations);

// b ~ uniform on S^{m-1} for each point; cluster k gets n_k points.
DataMatrix sample_points(const SubspaceEnsemble& ens, Index n_per_cluster, Rng& rng);
DataMatrix sample_points(const SubspaceEnsemble& ens, const std::vector<Index>& cluster_sizes, Rng& rng);

// Coefficient block k is m_k x n_k; columns are mapped through [U, Û_k] and normalised.
DataMatrix sample_points_deterministic(const SubspaceEnsemble& ens, const std::vector<Matrix>& coefficients);

}  // namespace ipursuit
