#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ipursuit/datagen.hpp"
#include "ipursuit/linalg.hpp"

namespace ipursuit {

// ---- Subspace geometry of an ensemble -------------------------------------

// True when no innovation span lies inside the direct sum of the others.
bool innovation_assumption_holds(const SubspaceEnsemble& ens);

struct TValues {
  double t1 = 0.0;  // max_k aff∞(Û_k, Û_{-k})
  double t2 = 0.0;  // max_{i≠j} aff∞(Û_i, Û_j)
  double t3 = 0.0;  // max over points of aff∞(d, U_{-k})
};

TValues compute_t_values(const SubspaceEnsemble& ens, const DataMatrix& d);

// ---- Permeance statistics ---------------------------------------------------
//
// For coordinates B (m x n) of a cluster in its own basis,
//   h1 = inf_{|δ|=1} ||δᵀB||_1,   h2 = sup_{|δ|=1} ||δᵀB||_1.
// Above dimension 2 both are local-search estimates: h1_est is an upper bound
// on the true infimum and h2_est a lower bound on the true supremum.

struct Permeance {
  double h1 = 0.0;
  double h2 = 0.0;
};

// Two-level angle grid (10⁴ coarse points, then 10⁴ points around the best
// coarse angle). Needs m == 2.
Permeance permeance_grid(const Matrix& coords);

// Projected subgradient descent (h1) plus vertex polishing, and sign
// fixed-point ascent (h2), from `restarts` random unit starts.
Permeance permeance_local_search(const Matrix& coords, int restarts, std::uint64_t seed);

// Coordinates of the cluster points in `basis`, then the grid for m == 2 and
// the local search otherwise. Throws NotInSpan if a point leaves the span by > 1e-8.
Permeance permeance_estimate(const Matrix& cluster_points, const OrthonormalBasis& basis, int restarts = 32,
                             std::uint64_t seed = 0);

// ---- Closed-form quantities --------------------------------------------------

struct HBounds {
  double h1 = 0.0;
  double h2 = 0.0;
  bool vacuous() const { return h1 <= 0.0; }
};

// Semi-random permeance bounds; h1 may be negative (vacuous) and is not clamped.
HBounds semi_random_h_bounds(int n, int m);

// Both sufficient inequalities for an error-less affinity matrix.
bool check_theorem1(double h1, double h2, double t1, double t2, double t3, int k);

double zeta(int m, int s, int k, double t2, double t3);

struct ProbabilityBound {
  double probability = 0.0;  // unclamped
  double epsilon = 0.0;
  bool vacuous() const { return probability <= 0.0; }
};

// 1 − 2/n − 2N e^{−ε²}; flagged vacuous when ζ < 1 or the bound is <= 0.
struct Theorem2Bound : ProbabilityBound {
  double zeta = 0.0;
  bool zeta_below_one = false;
};
Theorem2Bound theorem2_probability(int n, int total_points, int m, int s, int k, double t2, double t3);

// Limiting value of aff∞²(Û_k, Û_{-k}) for random innovations.
double limiting_T(int ambient_dim, int m, int k, int s);

struct MuSigma {
  double mu = 0.0;
  double sigma = 0.0;
};
MuSigma johnstone_mu_sigma(int ambient_dim, int m, int k, int s);

struct Theorem4Bound {
  double ratio_bound = 0.0;
  double kappa_prime = 0.0;
  double epsilon = 0.0;
  double probability = 0.0;  // unclamped
  bool vacuous() const { return probability <= 0.0 || ratio_bound <= 0.0; }
};
Theorem4Bound theorem4_bound(int m, int s, int k, int n, double t2, double kappa);

// ---- Monte-Carlo experiments -------------------------------------------------

struct RatioRow {
  int s = 0;
  int m = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

// For each s: m = round(m_ratio·s); `trials` independent uniform subspaces of
// dims (m−s) and (K−1)(m−s)+s; ratio = cos²θ₁ / T (or cosθ₁ / √T with
// sqrt_convention). Trials run in parallel with per-trial child generators.
std::vector<RatioRow> ratio_experiment(int ambient_dim, int k, const std::vector<int>& s_list, double m_ratio,
                                       int trials, const Rng& rng, bool sqrt_convention = false);

// λ1/λ2 = ||Uᵀx₁|| / ||U⊥ᵀx₁|| for the first left singular vector x₁ of data
// sampled from `ens`, one value per trial. λ2 is measured inside span(D).
std::vector<double> theorem4_ratios(const SubspaceEnsemble& ens, int n, int trials, const Rng& rng);

struct Theorem4Empirical {
  double frequency = 0.0;  // fraction of trials with λ1/λ2 >= ratio_bound
  double mean_ratio = 0.0;
  std::vector<double> ratios;
  Theorem4Bound bound;
};
Theorem4Empirical theorem4_empirical(const SubspaceEnsemble& ens, int n, double kappa, int trials, const Rng& rng);

// ---- Aggregate report --------------------------------------------------------

struct TheoryReport {
  double h1_est = 0.0;
  double h2_est = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  bool innovation_assumption = false;
  bool theorem1_ok = false;
  std::optional<double> zeta;
  std::optional<double> theorem2_prob;
  std::optional<double> theorem2_epsilon;
  std::optional<double> h1_bound;
  std::optional<double> h2_bound;
  std::optional<double> T_limit;
  std::optional<double> mu;
  std::optional<double> sigma;
  std::optional<double> theorem4_bound;
  std::optional<double> theorem4_prob;
  std::optional<double> kappa_prime;
  std::optional<double> theorem4_epsilon;
};

struct TheoryInputs {
  int n_per_cluster = 0;
  std::optional<double> kappa;
  int permeance_restarts = 32;
  std::uint64_t seed = 0;
};

// Fills every quantity that is defined for the ensemble and data; the rest
// stay empty. Requires equal cluster dimensions.
TheoryReport make_theory_report(const SubspaceEnsemble& ens, const DataMatrix& d, const TheoryInputs& in);

}  // namespace ipursuit
