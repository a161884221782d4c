#include "ipursuit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ipursuit/error.hpp"

namespace ipursuit {

bool innovation_assumption_holds(const SubspaceEnsemble& ens) {
  const Index k_count = ens.num_clusters();
  if (k_count < 2) return true;
  for (Index k = 0; k < k_count; ++k) {
    const OrthonormalBasis& own = ens.innovations[static_cast<std::size_t>(k)];
    const OrthonormalBasis others = ens.others_innovation(k);
    if (own.empty()) return false;
    if (others.dim() < own.dim()) continue;
    // Contained iff every principal angle is zero, i.e. the smallest cosine is 1.
    const Vector cosines = principal_angle_cosines(own, others);
    if (cosines(cosines.size() - 1) >= 1.0 - 1e-8) return false;
  }
  return true;
}

namespace {

double max_pairwise_innovation_aff(const SubspaceEnsemble& ens) {
  double t2 = 0.0;
  for (Index i = 0; i < ens.num_clusters(); ++i)
    for (Index j = i + 1; j < ens.num_clusters(); ++j)
      t2 = std::max(t2, aff_inf(ens.innovations[static_cast<std::size_t>(i)],
                                ens.innovations[static_cast<std::size_t>(j)]));
  return t2;
}

}  // namespace

TValues compute_t_values(const SubspaceEnsemble& ens, const DataMatrix& d) {
  if (!d.labels) throw Error(ErrorCode::MissingLabels, "t-values need ground-truth labels");
  if (d.ambient_dim() != ens.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "data vs ensemble dims");
  const Index k_count = ens.num_clusters();
  TValues t;
  std::vector<OrthonormalBasis> others_full;
  for (Index k = 0; k < k_count; ++k) {
    const OrthonormalBasis others = ens.others_innovation(k);
    if (!others.empty()) t.t1 = std::max(t.t1, aff_inf(ens.innovations[static_cast<std::size_t>(k)], others));
    others_full.push_back(ens.others_span(k));
  }
  t.t2 = max_pairwise_innovation_aff(ens);
  for (Index i = 0; i < d.size(); ++i) {
    const int k = (*d.labels)[static_cast<std::size_t>(i)];
    if (k < 0 || k >= k_count) throw Error(ErrorCode::IndexOutOfRange, "label outside the ensemble", i);
    t.t3 = std::max(t.t3, aff_inf(Vector(d.points.col(i)), others_full[static_cast<std::size_t>(k)]));
  }
  return t;
}

// ---- permeance ---------------------------------------------------------------

namespace {

double l1_projection(const Matrix& coords, const Vector& delta) { return (coords.transpose() * delta).lpNorm<1>(); }

double l1_projection_angle(const Matrix& coords, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  double total = 0.0;
  for (Index j = 0; j < coords.cols(); ++j) total += std::abs(c * coords(0, j) + s * coords(1, j));
  return total;
}

Vector random_unit(Index m, Rng& rng) { return sample_unit_sphere(m, rng); }

// Unit vector orthogonal to the m−1 columns of `coords` with the smallest
// |b_jᵀδ|, if those columns are independent.
std::optional<Vector> nearest_vertex(const Matrix& coords, const Vector& delta) {
  const Index m = coords.rows(), n = coords.cols();
  if (m < 2 || n < m - 1) return std::nullopt;
  const Vector proj = (coords.transpose() * delta).cwiseAbs();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
  std::partial_sort(order.begin(), order.begin() + (m - 1), order.end(),
                    [&](Index a, Index b) { return proj(a) < proj(b) || (proj(a) == proj(b) && a < b); });
  Matrix active(m - 1, m);
  for (Index r = 0; r < m - 1; ++r) active.row(r) = coords.col(order[static_cast<std::size_t>(r)]).transpose();
  Eigen::JacobiSVD<Matrix> svd(active, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (sv.size() < m - 1 || sv(m - 2) <= kRankTolerance * std::max(1.0, sv(0))) return std::nullopt;
  return Vector(svd.matrixV().col(m - 1));
}

double descend_h1(const Matrix& coords, Vector delta) {
  double best = l1_projection(coords, delta);
  Vector best_delta = delta;
  constexpr int kIters = 300;
  for (int t = 0; t < kIters; ++t) {
    const Vector w = coords.transpose() * delta;
    Vector sign(w.size());
    for (Index j = 0; j < w.size(); ++j) sign(j) = w(j) > 0 ? 1.0 : (w(j) < 0 ? -1.0 : 0.0);
    Vector g = coords * sign;
    g -= g.dot(delta) * delta;
    const double gn = g.norm();
    if (gn < 1e-14) break;
    delta -= (0.5 / std::sqrt(t + 1.0)) * (g / gn);
    delta.normalize();
    const double f = l1_projection(coords, delta);
    if (f < best) {
      best = f;
      best_delta = delta;
    }
  }
  // The infimum sits at a vertex of the polytope ||Bᵀδ||_1 <= 1, where m−1
  // projections vanish; walk to nearby vertices while that improves.
  delta = best_delta;
  for (int step = 0; step < 4 * static_cast<int>(coords.rows()); ++step) {
    const auto vertex = nearest_vertex(coords, delta);
    if (!vertex) break;
    const double f = l1_projection(coords, *vertex);
    if (f >= best - 1e-15) break;
    best = f;
    delta = *vertex;
  }
  return best;
}

double ascend_h2(const Matrix& coords, Vector delta) {
  double best = l1_projection(coords, delta);
  Vector prev_sign;
  for (int t = 0; t < 200; ++t) {
    const Vector w = coords.transpose() * delta;
    Vector sign(w.size());
    for (Index j = 0; j < w.size(); ++j) sign(j) = w(j) >= 0 ? 1.0 : -1.0;
    if (prev_sign.size() == sign.size() && prev_sign == sign) break;
    const Vector g = coords * sign;
    const double gn = g.norm();
    if (gn == 0.0) break;
    delta = g / gn;
    best = std::max(best, l1_projection(coords, delta));
    prev_sign = sign;
  }
  return best;
}

}  // namespace

Permeance permeance_grid(const Matrix& coords) {
  if (coords.rows() != 2) throw Error(ErrorCode::InvalidDim, "angle grid needs intrinsic dimension 2");
  constexpr int kPoints = 10000;
  const double pi = std::numbers::pi;
  const double step = pi / kPoints;
  int arg_min = 0, arg_max = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -1.0;
  for (int i = 0; i < kPoints; ++i) {
    const double f = l1_projection_angle(coords, i * step);
    if (f < lo) {
      lo = f;
      arg_min = i;
    }
    if (f > hi) {
      hi = f;
      arg_max = i;
    }
  }
  auto refine = [&](int centre, bool minimise) {
    double best = minimise ? lo : hi;
    const double start = (centre - 1) * step;
    const double fine = 2.0 * step / kPoints;
    for (int i = 0; i <= kPoints; ++i) {
      const double f = l1_projection_angle(coords, start + i * fine);
      best = minimise ? std::min(best, f) : std::max(best, f);
    }
    return best;
  };
  return Permeance{refine(arg_min, true), refine(arg_max, false)};
}

Permeance permeance_local_search(const Matrix& coords, int restarts, std::uint64_t seed) {
  const Index m = coords.rows();
  if (m < 1 || coords.cols() < 1) throw Error(ErrorCode::InvalidDim, "permeance needs points and m >= 1");
  if (m == 1) {
    const double v = coords.lpNorm<1>();
    return Permeance{v, v};
  }
  Rng rng(seed);
  Permeance out{std::numeric_limits<double>::infinity(), 0.0};
  for (int r = 0; r < std::max(1, restarts); ++r) {
    out.h1 = std::min(out.h1, descend_h1(coords, random_unit(m, rng)));
    out.h2 = std::max(out.h2, ascend_h2(coords, random_unit(m, rng)));
  }
  // Seeds at the points themselves are cheap extra starts for the ascent.
  for (Index j = 0; j < coords.cols(); ++j) {
    const double nrm = coords.col(j).norm();
    if (nrm > 0.0) out.h2 = std::max(out.h2, ascend_h2(coords, coords.col(j) / nrm));
  }
  return out;
}

Permeance permeance_estimate(const Matrix& cluster_points, const OrthonormalBasis& basis, int restarts,
                             std::uint64_t seed) {
  if (cluster_points.rows() != basis.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "points vs basis");
  const Matrix coords = basis.matrix().transpose() * cluster_points;
  const Matrix residual = cluster_points - basis.matrix() * coords;
  if (residual.size() > 0 && residual.colwise().norm().maxCoeff() > 1e-8)
    throw Error(ErrorCode::NotInSpan, "cluster points leave the basis span");
  if (basis.dim() == 2) return permeance_grid(coords);
  return permeance_local_search(coords, restarts, seed);
}

// ---- closed forms -------------------------------------------------------------

HBounds semi_random_h_bounds(int n, int m) {
  if (n < 2 || m < 2) throw Error(ErrorCode::InvalidDims, "need n >= 2 and m >= 2");
  const double nn = n, mm = m;
  const double tail = 2.0 * std::sqrt(nn) + std::sqrt(2.0 * nn * std::log(nn) / (mm - 1.0));
  const double lead = nn / std::sqrt(mm);
  return HBounds{std::sqrt(2.0 / std::numbers::pi) * lead - tail, lead + tail};
}

bool check_theorem1(double h1, double h2, double t1, double t2, double t3, int k) {
  if (!(t3 < 1.0) || t3 < 0.0) throw Error(ErrorCode::DomainError, "t3 must lie in [0, 1)");
  if ((k - 2) * t2 >= 1.0) throw Error(ErrorCode::DomainError, "(K-2) t2 must be < 1");
  const double lift = std::sqrt(t3 * t3 / (1.0 - t3 * t3));
  const bool first = h1 * std::sqrt(1.0 - (k - 2) * t2) >= h2 * (lift + t1);
  const bool second = h1 * std::sqrt(static_cast<double>(k - 1)) >= h2 * (lift + 1.0);
  return first && second;
}

double zeta(int m, int s, int k, double t2, double t3) {
  if (!(s > 0 && s < m) || k < 1) throw Error(ErrorCode::DomainError, "zeta needs 0 < s < m and K >= 1");
  if (!(t3 < 1.0) || t3 < 0.0) throw Error(ErrorCode::DomainError, "t3 must lie in [0, 1)");
  return (m - s) * (t3 * t3 - (k - 1) * t2 * t2) / (s * (1.0 - t3 * t3));
}

Theorem2Bound theorem2_probability(int n, int total_points, int m, int s, int k, double t2, double t3) {
  if (n < 1 || total_points < 1) throw Error(ErrorCode::DomainError, "n and N must be positive");
  Theorem2Bound out;
  out.zeta = zeta(m, s, k, t2, t3);
  out.zeta_below_one = out.zeta < 1.0;
  const double ss = s;
  const double x = std::sqrt(ss) + out.zeta * ss / std::sqrt(static_cast<double>(m - s));
  const double disc = x * x + 2.0 * ss * (out.zeta - 1.0);
  if (disc < 0.0) throw Error(ErrorCode::DomainError, "epsilon is undefined for this zeta");
  out.epsilon = 0.5 * (-x + std::sqrt(disc));
  out.probability = 1.0 - 2.0 / n - 2.0 * total_points * std::exp(-out.epsilon * out.epsilon);
  return out;
}

double limiting_T(int ambient_dim, int m, int k, int s) {
  if (ambient_dim < 1 || m < 1 || k < 1 || s < 0 || s > m)
    throw Error(ErrorCode::DomainError, "limiting_T needs M, m, K >= 1 and 0 <= s <= m");
  const double inn = m - s;
  const double radicand = inn * ((k - 2) * inn + m);
  if (radicand < 0.0) throw Error(ErrorCode::DomainError, "negative radicand");
  return ((k - 1) * inn + m + 2.0 * std::sqrt(radicand)) / ambient_dim;
}

MuSigma johnstone_mu_sigma(int ambient_dim, int m, int k, int s) {
  if (ambient_dim < 2 || k < 1 || s < 0 || s >= m)
    throw Error(ErrorCode::DomainError, "mu/sigma need M >= 2 and 0 <= s < m");
  if (s == 0 && k == 1) throw Error(ErrorCode::DomainError, "sin(gamma) vanishes for s = 0, K = 1");
  const double half_phi = std::sqrt(static_cast<double>(m - s) / ambient_dim);
  const double half_gamma = std::sqrt(static_cast<double>((k - 1) * (m - s) + s) / ambient_dim);
  const double phi = 2.0 * half_phi, gamma = 2.0 * half_gamma;
  const double sin_sum = std::sin(half_phi + half_gamma);
  const double denom = 4.0 * std::pow(ambient_dim - 1.0, 2) * std::sin(phi) * std::sin(gamma);
  if (!(denom > 0.0)) throw Error(ErrorCode::DomainError, "sin(phi) sin(gamma) must be positive");
  return MuSigma{sin_sum * sin_sum, std::cbrt(std::pow(std::sin(phi + gamma), 4) / denom)};
}

Theorem4Bound theorem4_bound(int m, int s, int k, int n, double t2, double kappa) {
  if (m < 2 || s <= 0 || s >= m || k < 1 || n < 2 || t2 < 0.0)
    throw Error(ErrorCode::DomainError, "theorem4 needs m >= 2, 0 < s < m, K >= 1, n >= 2");
  const double inn = m - s;
  const double lower = inn / m;
  // The lower end is admitted so the ε = 0 boundary can be evaluated.
  if (!(kappa >= lower - 1e-12 && kappa < 1.0))
    throw Error(ErrorCode::DomainError, "kappa must lie in [(m-s)/m, 1)");
  const double nn = n, mm = m, ss = s;
  const double bracket = std::sqrt(2.0 * k * nn / (std::numbers::pi * mm)) - 2.0 - std::sqrt(2.0 * std::log(nn) / (mm - 1.0));
  Theorem4Bound out;
  out.kappa_prime = mm * bracket * bracket / ((1.0 + (k - 1) * t2) * nn * inn * kappa);
  out.ratio_bound = (out.kappa_prime - 1.0) / (2.0 * std::sqrt(out.kappa_prime));
  const double a = std::sqrt(inn) + kappa * std::sqrt(ss) / (1.0 - kappa);
  double b = kappa * ss / ((1.0 - kappa) * inn) - 1.0;
  if (std::abs(b) < 1e-12) b = 0.0;
  out.epsilon = inn * b / (a + std::sqrt(a * a + 2.0 * inn * b));
  out.probability = 1.0 - 1.0 / nn - 2.0 * k * nn * std::exp(-out.epsilon * out.epsilon);
  return out;
}

// ---- Monte-Carlo ----------------------------------------------------------------

std::vector<RatioRow> ratio_experiment(int ambient_dim, int k, const std::vector<int>& s_list, double m_ratio,
                                       int trials, const Rng& rng, bool sqrt_convention) {
  if (ambient_dim < 1 || k < 1 || trials < 1 || !(m_ratio > 1.0) || s_list.empty())
    throw Error(ErrorCode::DomainError, "ratio_experiment needs M, K, trials >= 1, m_ratio > 1 and some s");
  struct Point {
    int s, m, p, q;
    double t;
  };
  std::vector<Point> grid;
  for (int s : s_list) {
    const int m = static_cast<int>(std::lround(m_ratio * s));
    const int p = m - s, q = (k - 1) * (m - s) + s;
    if (s < 0 || p < 1 || p + q > ambient_dim)
      throw Error(ErrorCode::DomainError, "s = " + std::to_string(s) + " gives invalid dimensions");
    grid.push_back(Point{s, m, p, q, limiting_T(ambient_dim, m, k, s)});
  }

  std::vector<RatioRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Point pt = grid[g];
    const Rng point_rng = rng.split(g);
    std::vector<double> ratios(static_cast<std::size_t>(trials));
    // By rotation invariance one subspace may be fixed to the first
    // coordinates; the smaller one is drawn at random.
    const int drawn = std::min(pt.p, pt.q), fixed = std::max(pt.p, pt.q);
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < trials; ++t) {
      Rng trial_rng = point_rng.split(static_cast<std::uint64_t>(t));
      const OrthonormalBasis a = sample_grassmannian(ambient_dim, drawn, trial_rng);
      const Matrix head = a.matrix().topRows(fixed);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(head.transpose() * head, Eigen::EigenvaluesOnly);
      const double cos2 = std::clamp(eig.eigenvalues().maxCoeff(), 0.0, 1.0);
      ratios[static_cast<std::size_t>(t)] = sqrt_convention ? std::sqrt(cos2) / std::sqrt(pt.t) : cos2 / pt.t;
    }
    RatioRow row{pt.s, pt.m, 0.0, ratios.front(), ratios.front()};
    for (double r : ratios) {
      row.mean_ratio += r;
      row.min_ratio = std::min(row.min_ratio, r);
      row.max_ratio = std::max(row.max_ratio, r);
    }
    row.mean_ratio /= trials;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> theorem4_ratios(const SubspaceEnsemble& ens, int n, int trials, const Rng& rng) {
  if (ens.intersection_dim() == 0) throw Error(ErrorCode::DomainError, "lambda1 is identically zero when s = 0");
  if (n < 1 || trials < 1) throw Error(ErrorCode::DomainError, "need n >= 1 and trials >= 1");
  const Matrix& u = ens.intersection.matrix();
  std::vector<double> ratios(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = rng.split(static_cast<std::uint64_t>(t));
    const DataMatrix d = sample_points(ens, n, trial_rng);
    Matrix gram = Matrix::Zero(d.ambient_dim(), d.ambient_dim());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(d.points);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram.selfadjointView<Eigen::Lower>());
    const Vector x1 = eig.eigenvectors().col(d.ambient_dim() - 1);
    const Vector inside = u.transpose() * x1;
    const double lambda1 = inside.norm();
    const double lambda2 = (x1 - u * inside).norm();
    ratios[static_cast<std::size_t>(t)] =
        lambda2 > 0.0 ? lambda1 / lambda2 : std::numeric_limits<double>::infinity();
  }
  return ratios;
}

Theorem4Empirical theorem4_empirical(const SubspaceEnsemble& ens, int n, double kappa, int trials, const Rng& rng) {
  const int m = static_cast<int>(ens.cluster_dim(0));
  for (Index k = 1; k < ens.num_clusters(); ++k)
    if (ens.cluster_dim(k) != m) throw Error(ErrorCode::DomainError, "clusters must share one dimension");
  Theorem4Empirical out;
  out.bound = theorem4_bound(m, static_cast<int>(ens.intersection_dim()), static_cast<int>(ens.num_clusters()), n,
                             max_pairwise_innovation_aff(ens), kappa);
  out.ratios = theorem4_ratios(ens, n, trials, rng);
  int hits = 0;
  for (double r : out.ratios) {
    out.mean_ratio += r;
    if (r >= out.bound.ratio_bound) ++hits;
  }
  out.mean_ratio /= trials;
  out.frequency = static_cast<double>(hits) / trials;
  return out;
}

// ---- report ----------------------------------------------------------------------

TheoryReport make_theory_report(const SubspaceEnsemble& ens, const DataMatrix& d, const TheoryInputs& in) {
  const int k = static_cast<int>(ens.num_clusters());
  const int big_m = static_cast<int>(ens.ambient_dim());
  const int s = static_cast<int>(ens.intersection_dim());
  const int m = static_cast<int>(ens.cluster_dim(0));
  for (int c = 1; c < k; ++c)
    if (ens.cluster_dim(c) != m) throw Error(ErrorCode::InvalidDims, "report needs equal cluster dimensions");
  if (!d.labels) throw Error(ErrorCode::MissingLabels, "report needs labels");
  const int n = in.n_per_cluster > 0 ? in.n_per_cluster : static_cast<int>(d.size() / std::max(1, k));

  TheoryReport r;
  const TValues t = compute_t_values(ens, d);
  r.t1 = t.t1;
  r.t2 = t.t2;
  r.t3 = t.t3;
  r.innovation_assumption = innovation_assumption_holds(ens);

  r.h1_est = std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    const Permeance p = permeance_estimate(d.cluster(c), OrthonormalBasis::adopt(ens.cluster_basis(c), 1e-8),
                                           in.permeance_restarts, in.seed + static_cast<std::uint64_t>(c));
    r.h1_est = std::min(r.h1_est, p.h1);
    r.h2_est = std::max(r.h2_est, p.h2);
  }

  if (r.t3 < 1.0 && (k - 2) * r.t2 < 1.0)
    r.theorem1_ok = r.innovation_assumption && check_theorem1(r.h1_est, r.h2_est, r.t1, r.t2, r.t3, k);

  if (s > 0 && s < m && r.t3 < 1.0) {
    r.zeta = zeta(m, s, k, r.t2, r.t3);
    try {
      const Theorem2Bound b = theorem2_probability(n, static_cast<int>(d.size()), m, s, k, r.t2, r.t3);
      r.theorem2_prob = b.probability;
      r.theorem2_epsilon = b.epsilon;
    } catch (const Error&) {
    }
  }
  if (n >= 2 && m >= 2) {
    const HBounds hb = semi_random_h_bounds(n, m);
    r.h1_bound = hb.h1;
    r.h2_bound = hb.h2;
  }
  r.T_limit = limiting_T(big_m, m, k, s);
  try {
    const MuSigma ms = johnstone_mu_sigma(big_m, m, k, s);
    r.mu = ms.mu;
    r.sigma = ms.sigma;
  } catch (const Error&) {
  }
  if (in.kappa) {
    try {
      const Theorem4Bound b = theorem4_bound(m, s, k, n, r.t2, *in.kappa);
      r.theorem4_bound = b.ratio_bound;
      r.theorem4_prob = b.probability;
      r.kappa_prime = b.kappa_prime;
      r.theorem4_epsilon = b.epsilon;
    } catch (const Error&) {
    }
  }
  return r;
}

}  // namespace ipursuit
