#pragma once

#include <optional>
#include <variant>

#include "ipursuit/datagen.hpp"
#include "ipursuit/solver.hpp"

namespace ipursuit {

// Symmetric, nonnegative, zero-diagonal N x N weights.
struct AffinityGraph {
  Matrix weights;
  int sparsify_q = 0;
};

struct ClusterAssignment {
  Labels labels;
  int k = 0;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
  double rel_tol = 1e-6;
};

// Keeps the q largest entries of each row of |C*ᵀD| (diagonal zeroed first),
// then returns W + Wᵀ.
AffinityGraph build_affinity(const DirectionSet& dirs, const DataMatrix& d, int q);
// Same rule applied to an arbitrary nonnegative similarity matrix.
AffinityGraph sparsify_symmetrize(Matrix raw, int q);

// ||W_cross||_1 / ||W||_1 for the given ground-truth labels.
double cross_affinity_ratio(const AffinityGraph& w, const Labels& truth);

// k-means++ seeding, `restarts` runs, lowest within-cluster sum of squares wins.
// Rows of `points` are the observations.
ClusterAssignment kmeans(const Matrix& points, int k, Rng& rng, const KMeansOptions& opts = {});

// Normalised spectral clustering on the symmetric Laplacian I − Δ^{-1/2} W Δ^{-1/2}.
ClusterAssignment spectral_cluster(const AffinityGraph& w, int k, Rng& rng);

// Removes the projection on the top-ŝ left singular vectors and renormalises.
DataMatrix enhance(const DataMatrix& d, int s_hat);

// ŝ = argmax_i σ_i/σ_{i+1} for 1 <= i <= min(cap, len-1), or 0 when the best
// ratio is below gap_threshold.
int estimate_shat(const Vector& singular_values, int cap = 20, double gap_threshold = 2.0);

struct AutoShat {};
using EnhancePolicy = std::variant<std::monostate, AutoShat, int>;

struct PipelineResult {
  ClusterAssignment assignment;
  AffinityGraph affinity;
  int s_hat = 0;
  DirectionSet directions;
};

PipelineResult run_pipeline(const DataMatrix& d, int k, int q, const SolverConfig& cfg, const EnhancePolicy& enhance_shat,
                            Rng& rng);

// Thresholded-inner-product affinity |DᵀD| fed to the same spectral backend.
ClusterAssignment tsc_baseline(const DataMatrix& d, int k, int q, Rng& rng);

ClusterAssignment kmeans_baseline(const DataMatrix& d, int k, Rng& rng);

}  // namespace ipursuit
