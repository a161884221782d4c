#include "ipursuit/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ipursuit/error.hpp"

namespace ipursuit {

AffinityGraph sparsify_symmetrize(Matrix raw, int q) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
  if (raw.rows() != raw.cols()) throw Error(ErrorCode::ShapeMismatch, "affinity must be square");
  const Index n = raw.rows();
  raw.diagonal().setZero();
  std::vector<Index> order(static_cast<std::size_t>(n));
  if (q < n - 1) {
    for (Index i = 0; i < n; ++i) {
      std::iota(order.begin(), order.end(), Index{0});
      auto row = raw.row(i);
      // Largest first; equal values resolved by column index.
      std::nth_element(order.begin(), order.begin() + q, order.end(), [&](Index a, Index b) {
        return row(a) > row(b) || (row(a) == row(b) && a < b);
      });
      for (auto it = order.begin() + q; it != order.end(); ++it) row(*it) = 0.0;
    }
  }
  AffinityGraph g;
  g.weights = raw + raw.transpose();
  g.sparsify_q = q;
  return g;
}

AffinityGraph build_affinity(const DirectionSet& dirs, const DataMatrix& d, int q) {
  if (dirs.directions.rows() != d.ambient_dim() || dirs.directions.cols() != d.size())
    throw Error(ErrorCode::ShapeMismatch, "direction set does not match the data");
  return sparsify_symmetrize((dirs.directions.transpose() * d.points).cwiseAbs(), q);
}

double cross_affinity_ratio(const AffinityGraph& w, const Labels& truth) {
  const Index n = w.weights.rows();
  if (static_cast<Index>(truth.size()) != n) throw Error(ErrorCode::LengthMismatch, "labels vs affinity size");
  double total = 0.0, cross = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double v = std::abs(w.weights(i, j));
      total += v;
      if (truth[static_cast<std::size_t>(i)] != truth[static_cast<std::size_t>(j)]) cross += v;
    }
  return total > 0.0 ? cross / total : 0.0;
}

namespace {

struct LloydResult {
  Labels labels;
  double inertia = std::numeric_limits<double>::infinity();
};

Matrix seed_plus_plus(const Matrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector dist = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Index pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Index i = 0; i < n; ++i) {
        target -= dist(i);
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = x.row(pick);
    dist = dist.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

LloydResult lloyd(const Matrix& x, Matrix centers, const KMeansOptions& opts) {
  const Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  LloydResult out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  Vector best_d(n);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iters; ++it) {
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = (x.row(i) - centers.row(c)).squaredNorm();
        if (dd < best) {
          best = dd;
          arg = c;
        }
      }
      out.labels[static_cast<std::size_t>(i)] = arg;
      best_d(i) = best;
      inertia += best;
    }
    out.inertia = inertia;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = out.labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Empty cluster: re-seed at the point farthest from its centre.
        Index far = 0;
        best_d.maxCoeff(&far);
        centers.row(c) = x.row(far);
        best_d(far) = 0.0;
      }
    }
    if (inertia == 0.0 || std::abs(prev - inertia) <= opts.rel_tol * prev) break;
    prev = inertia;
  }
  return out;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, int k, Rng& rng, const KMeansOptions& opts) {
  const Index n = points.rows();
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidK, "K must satisfy 1 <= K <= N");
  if (k == 1) return ClusterAssignment{Labels(static_cast<std::size_t>(n), 0), 1};
  LloydResult best;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    LloydResult run = lloyd(points, seed_plus_plus(points, k, rng), opts);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return ClusterAssignment{std::move(best.labels), k};
}

ClusterAssignment spectral_cluster(const AffinityGraph& w, int k, Rng& rng) {
  const Matrix& weights = w.weights;
  const Index n = weights.rows();
  if (weights.cols() != n) throw Error(ErrorCode::ShapeMismatch, "affinity must be square");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidK, "K must satisfy 1 <= K <= N");
  const Vector degree = weights.rowwise().sum();
  for (Index i = 0; i < n; ++i)
    if (degree(i) < 1e-12) throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(i) + " has zero degree", i);
  if (k == 1) return ClusterAssignment{Labels(static_cast<std::size_t>(n), 0), 1};

  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  // K smallest eigenvalues of I − A are the K largest of A = Δ^{-1/2} W Δ^{-1/2}.
  const Matrix a = inv_sqrt.asDiagonal() * weights * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  Matrix embed = eig.eigenvectors().rightCols(k);
  for (Index i = 0; i < n; ++i) {
    const double r = embed.row(i).norm();
    if (r > 0.0) embed.row(i) /= r;
  }
  return kmeans(embed, k, rng);
}

DataMatrix enhance(const DataMatrix& d, int s_hat) {
  if (s_hat < 0) throw Error(ErrorCode::InvalidArgument, "s_hat must be >= 0");
  const ThinSvd svd = thin_svd(d.points);
  const Index rank = svd.rank();
  if (s_hat >= rank)
    throw Error(ErrorCode::RankTooLow, "s_hat " + std::to_string(s_hat) + " >= rank " + std::to_string(rank));
  if (s_hat == 0) return d;
  const Matrix kept = svd.u.middleCols(s_hat, rank - s_hat);
  DataMatrix out{kept * (kept.transpose() * d.points), d.labels};
  for (Index i = 0; i < out.size(); ++i) {
    const double nrm = out.points.col(i).norm();
    if (nrm < 1e-8)
      throw Error(ErrorCode::DegeneratePoint, "point " + std::to_string(i) + " lies in the removed span", i);
    out.points.col(i) /= nrm;
  }
  return out;
}

int estimate_shat(const Vector& singular_values, int cap, double gap_threshold) {
  const Index len = singular_values.size();
  if (len < 2) throw Error(ErrorCode::TooFewValues, "need at least two singular values");
  const Index last = std::min<Index>(cap, len - 1);
  int arg = 0;
  double best = -1.0;
  for (Index i = 1; i <= last; ++i) {
    const double den = singular_values(i);
    const double ratio = den > 0.0 ? singular_values(i - 1) / den : std::numeric_limits<double>::infinity();
    if (ratio > best) {
      best = ratio;
      arg = static_cast<int>(i);
    }
  }
  return best >= gap_threshold ? arg : 0;
}

PipelineResult run_pipeline(const DataMatrix& d, int k, int q, const SolverConfig& cfg, const EnhancePolicy& enhance_shat,
                            Rng& rng) {
  if (k < 1 || k > d.size()) throw Error(ErrorCode::InvalidK, "K must satisfy 1 <= K <= N");
  PipelineResult out;
  if (std::holds_alternative<AutoShat>(enhance_shat)) {
    // Only the numerically nonzero spectrum; the drop to roundoff at the rank
    // would otherwise always win the gap test.
    const ThinSvd svd = thin_svd(d.points);
    const Index r = svd.rank();
    out.s_hat = r < 2 ? 0 : estimate_shat(svd.singular_values.head(r));
  } else if (const int* fixed = std::get_if<int>(&enhance_shat)) {
    out.s_hat = *fixed;
  }
  const DataMatrix work = out.s_hat > 0 ? enhance(d, out.s_hat) : d;
  out.directions = all_directions(work, cfg);
  out.affinity = build_affinity(out.directions, work, q);
  out.assignment = spectral_cluster(out.affinity, k, rng);
  return out;
}

ClusterAssignment tsc_baseline(const DataMatrix& d, int k, int q, Rng& rng) {
  const AffinityGraph g = sparsify_symmetrize((d.points.transpose() * d.points).cwiseAbs(), q);
  return spectral_cluster(g, k, rng);
}

ClusterAssignment kmeans_baseline(const DataMatrix& d, int k, Rng& rng) {
  return kmeans(d.points.transpose(), k, rng);
}

}  // namespace ipursuit
