#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "ipursuit/metrics.hpp"
#include "ipursuit/pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ipursuit;

namespace {

bool same_partition(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

AffinityGraph graph(Matrix w) {
  return AffinityGraph{std::move(w), 0};
}

double max_cross_coherence(const DataMatrix& d) {
  const Matrix g = (d.points.transpose() * d.points).cwiseAbs();
  double worst = 0.0;
  for (Index i = 0; i < d.size(); ++i)
    for (Index j = 0; j < d.size(); ++j)
      if ((*d.labels)[static_cast<std::size_t>(i)] != (*d.labels)[static_cast<std::size_t>(j)])
        worst = std::max(worst, g(i, j));
  return worst;
}

DataMatrix orthogonal_two_cluster(Rng& rng, Index n) {
  const auto ens = make_ensemble_deterministic(Matrix(6, 0), {unit_columns(6, {0, 1, 2}), unit_columns(6, {3, 4, 5})});
  return sample_points(ens, n, rng);
}

}  // namespace

TEST_CASE("affinity construction") {
  SUBCASE("row rule") {
    Matrix raw = Matrix::Zero(4, 4);
    raw.row(0) << 1, 0.6, 0, 0.3;
    const AffinityGraph w = sparsify_symmetrize(raw, 2);
    CHECK(w.weights(0, 0) == 0.0);
    CHECK(w.weights(0, 1) == doctest::Approx(0.6));
    CHECK(w.weights(0, 2) == 0.0);
    CHECK(w.weights(0, 3) == doctest::Approx(0.3));
    CHECK(w.weights(1, 0) == doctest::Approx(0.6));
    CHECK(w.sparsify_q == 2);
  }
  SUBCASE("invariants over random inputs") {
    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      const Index n = 3 + static_cast<Index>(rng.below(10));
      const int q = 1 + static_cast<int>(rng.below(4));
      const Matrix raw = gaussian_matrix(n, n, rng).cwiseAbs();
      const Matrix w = sparsify_symmetrize(raw, q).weights;
      CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(w.minCoeff() >= 0.0);
      CHECK(w.diagonal().cwiseAbs().maxCoeff() == 0.0);
      // The q largest off-diagonal entries of each row survive, possibly
      // increased by the mirrored entry.
      for (Index i = 0; i < n; ++i) {
        std::vector<double> row;
        for (Index j = 0; j < n; ++j)
          if (j != i) row.push_back(raw(i, j));
        std::sort(row.begin(), row.end(), std::greater<>());
        const double kth = row[static_cast<std::size_t>(std::min<Index>(q, n - 1) - 1)];
        for (Index j = 0; j < n; ++j)
          if (j != i && raw(i, j) > kth) CHECK(w(i, j) >= raw(i, j));
      }
    }
  }
  SUBCASE("orthogonal clusters give a block-diagonal graph") {
    Rng rng(4);
    const DataMatrix d = orthogonal_two_cluster(rng, 15);
    const AffinityGraph w = build_affinity(all_directions(d), d, 3);
    CHECK(w.weights.block(0, 15, 15, 15).maxCoeff() < 1e-6);
    CHECK(cross_affinity_ratio(w, *d.labels) < 1e-6);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { sparsify_symmetrize(Matrix::Ones(3, 3), 0); }) == ErrorCode::InvalidArgument);
    Rng rng(4);
    const DataMatrix d = orthogonal_two_cluster(rng, 3);
    const DataMatrix other = orthogonal_two_cluster(rng, 4);
    const DirectionSet dirs = all_directions(d);
    CHECK(code_of([&] { build_affinity(dirs, other, 2); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("spectral clustering") {
  SUBCASE("connected components are recovered for any seed") {
    Matrix w = Matrix::Zero(9, 9);
    for (Index i = 0; i < 9; ++i)
      for (Index j = 0; j < 9; ++j)
        if (i != j && i / 3 == j / 3) w(i, j) = 0.5 + 0.1 * static_cast<double>((i + j) % 3);
    const Labels truth{0, 0, 0, 1, 1, 1, 2, 2, 2};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      CHECK(same_partition(spectral_cluster(graph(w), 3, rng).labels, truth));
    }
  }
  SUBCASE("single cluster") {
    Matrix w = Matrix::Ones(5, 5);
    w.diagonal().setZero();
    Rng rng(0);
    const auto out = spectral_cluster(graph(w), 1, rng);
    CHECK(out.labels == Labels(5, 0));
  }
  SUBCASE("agrees with the minimum normalised cut") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      Matrix w(6, 6);
      for (Index i = 0; i < 6; ++i)
        for (Index j = i; j < 6; ++j) {
          const double base = (i / 3 == j / 3) ? 1.0 : 0.05;
          w(i, j) = w(j, i) = (i == j) ? 0.0 : base * (0.5 + rng.uniform());
        }
      double best = INFINITY;
      std::vector<int> best_side;
      for (int mask = 1; mask < 32; ++mask) {
        std::vector<int> side(6, 0);
        for (int b = 0; b < 5; ++b) side[static_cast<std::size_t>(b + 1)] = (mask >> b) & 1;
        const double cut = oracle::normalized_cut(w, side);
        if (cut < best) {
          best = cut;
          best_side = side;
        }
      }
      CHECK(same_partition(spectral_cluster(graph(w), 2, rng).labels, best_side));
    }
  }
  SUBCASE("errors") {
    Rng rng(0);
    Matrix w = Matrix::Ones(4, 4);
    w.diagonal().setZero();
    w.row(2).setZero();
    w.col(2).setZero();
    try {
      spectral_cluster(graph(w), 2, rng);
      FAIL("expected IsolatedNode");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IsolatedNode);
      CHECK(e.index() == 2);
    }
    CHECK(code_of([&] { spectral_cluster(graph(Matrix::Ones(3, 3)), 4, rng); }) == ErrorCode::InvalidK);
  }
}

TEST_CASE("k-means") {
  SUBCASE("separated blobs") {
    Rng rng(9);
    Matrix pts(40, 3);
    for (Index i = 0; i < 40; ++i) {
      const double off = i < 20 ? -10.0 : 10.0;
      for (Index j = 0; j < 3; ++j) pts(i, j) = off + rng.normal();
    }
    Labels truth(40, 0);
    std::fill(truth.begin() + 20, truth.end(), 1);
    CHECK(same_partition(kmeans(pts, 2, rng).labels, truth));
    DataMatrix d{pts.transpose(), truth};
    CHECK(clustering_accuracy(kmeans_baseline(d, 2, rng).labels, truth) == 1.0);
  }
  SUBCASE("reproducible and bounded labels") {
    Rng data_rng(2);
    const Matrix pts = gaussian_matrix(50, 4, data_rng);
    Rng a(17), b(17);
    const auto la = kmeans(pts, 4, a).labels;
    CHECK(la == kmeans(pts, 4, b).labels);
    for (int l : la) CHECK((l >= 0 && l < 4));
  }
  SUBCASE("K = 1 and invalid K") {
    Rng rng(0);
    const DataMatrix d{Matrix::Identity(3, 3), std::nullopt};
    CHECK(kmeans_baseline(d, 1, rng).labels == Labels(3, 0));
    CHECK(code_of([&] { kmeans_baseline(d, 4, rng); }) == ErrorCode::InvalidK);
    CHECK(code_of([&] { kmeans_baseline(d, 0, rng); }) == ErrorCode::InvalidK);
  }
}

TEST_CASE("enhancement") {
  SUBCASE("estimate_shat rule") {
    CHECK(estimate_shat(Vector{{10, 2, 1.9, 1.8}}) == 1);
    CHECK(estimate_shat(Vector{{5, 5, 5, 0.1}}) == 3);
    CHECK(estimate_shat(Vector{{4, 3.9, 3.8, 3.7}}) == 0);
    CHECK(estimate_shat(Vector{{5, 5, 5, 0.1}}, 2) == 0);
    CHECK(code_of([] { estimate_shat(Vector{{1.0}}); }) == ErrorCode::TooFewValues);
  }
  SUBCASE("empty filter is the identity") {
    Rng rng(3);
    const auto ens = make_ensemble_fully_random(10, 2, 3, 1, rng);
    const DataMatrix d = sample_points(ens, 8, rng);
    CHECK((enhance(d, 0).points - d.points).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("rank limit") {
    Matrix p = Matrix::Zero(3, 4);
    p.row(0).setOnes();
    const DataMatrix d{p, std::nullopt};
    CHECK(code_of([&] { enhance(d, 1); }) == ErrorCode::RankTooLow);
  }
  SUBCASE("removing a dominant shared direction lowers cross coherence") {
    Rng rng(12);
    const Vector u = sample_unit_sphere(20, rng);
    Matrix p(20, 40);
    Labels lab(40);
    const Matrix basis0 = sample_grassmannian(20, 3, rng).matrix();
    const Matrix basis1 = sample_grassmannian(20, 3, rng).matrix();
    for (Index i = 0; i < 40; ++i) {
      const Matrix& b = i < 20 ? basis0 : basis1;
      p.col(i) = u + 0.1 * b * sample_unit_sphere(3, rng);
      lab[static_cast<std::size_t>(i)] = i < 20 ? 0 : 1;
    }
    DataMatrix d{p, lab};
    normalize_columns(d.points);
    const DataMatrix e = enhance(d, 1);
    for (Index i = 0; i < e.size(); ++i) CHECK(std::abs(e.points.col(i).norm() - 1.0) < 1e-12);
    CHECK(max_cross_coherence(e) < max_cross_coherence(d));
  }
}

TEST_CASE("end-to-end") {
  SUBCASE("orthogonal clusters are recovered by every method") {
    Rng rng(21);
    // q=5 keeps each 3-dimensional cluster connected; q=3 occasionally splits one.
    const DataMatrix d = orthogonal_two_cluster(rng, 20);
    Rng r1(1), r2(1);
    const auto res = run_pipeline(d, 2, 5, {}, std::monostate{}, r1);
    CHECK(clustering_accuracy(res.assignment.labels, *d.labels) == 1.0);
    CHECK(res.s_hat == 0);
    CHECK(clustering_accuracy(tsc_baseline(d, 2, 5, r2).labels, *d.labels) == 1.0);
    CHECK(res.assignment.k == 2);
  }
  SUBCASE("zero enhancement matches no enhancement") {
    Rng rng(5);
    const auto ens = make_ensemble_fully_random(20, 3, 4, 2, rng);
    const DataMatrix d = sample_points(ens, 15, rng);
    Rng r1(8), r2(8);
    const auto a = run_pipeline(d, 3, 3, {}, std::monostate{}, r1);
    const auto b = run_pipeline(d, 3, 3, {}, 0, r2);
    CHECK(a.assignment.labels == b.assignment.labels);
    CHECK(a.affinity.weights == b.affinity.weights);
  }
  SUBCASE("same backend as the baseline given the same graph") {
    Rng rng(6);
    const auto ens = make_ensemble_fully_random(20, 2, 4, 1, rng);
    const DataMatrix d = sample_points(ens, 15, rng);
    const Matrix raw = (d.points.transpose() * d.points).cwiseAbs();
    Rng r1(3), r2(3);
    CHECK(tsc_baseline(d, 2, 3, r1).labels == spectral_cluster(sparsify_symmetrize(raw, 3), 2, r2).labels);
  }
  SUBCASE("auto enhancement picks the shared dimension") {
    Rng rng(7);
    // Shared directions carry far more energy than any innovation direction.
    const auto ens = make_ensemble_fully_random(100, 10, 8, 6, rng);
    const DataMatrix d = sample_points(ens, 40, rng);
    Rng r(1);
    const auto res = run_pipeline(d, 10, 3, {}, AutoShat{}, r);
    CHECK(res.s_hat == 6);
  }
  SUBCASE("column permutation permutes the graph and the labels") {
    Rng rng(13);
    // Well separated, so k-means has a single good partition to find.
    const auto ens = make_ensemble_fully_random(15, 3, 3, 0, rng);
    const DataMatrix d = sample_points(ens, 12, rng);
    std::vector<Index> perm(static_cast<std::size_t>(d.size()));
    for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = static_cast<Index>((j * 11) % perm.size());
    Matrix shuffled(d.points.rows(), d.size());
    for (std::size_t j = 0; j < perm.size(); ++j) shuffled.col(static_cast<Index>(j)) = d.points.col(perm[j]);
    Rng r1(2), r2(2);
    const auto a = run_pipeline(d, 3, 3, {}, std::monostate{}, r1).assignment.labels;
    const auto b = run_pipeline(DataMatrix{shuffled, std::nullopt}, 3, 3, {}, std::monostate{}, r2).assignment.labels;
    Labels a_perm(a.size());
    for (std::size_t j = 0; j < perm.size(); ++j) a_perm[j] = a[static_cast<std::size_t>(perm[j])];
    CHECK(same_partition(a_perm, b));
    Rng r3(2), r4(2);
    const Matrix wa = run_pipeline(d, 3, 3, {}, std::monostate{}, r3).affinity.weights;
    const Matrix wb = run_pipeline(DataMatrix{shuffled, std::nullopt}, 3, 3, {}, std::monostate{}, r4).affinity.weights;
    double worst = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = 0; j < perm.size(); ++j)
        worst = std::max(worst, std::abs(wa(perm[i], perm[j]) - wb(static_cast<Index>(i), static_cast<Index>(j))));
    CHECK(worst < 1e-9);
  }
  SUBCASE("inner products fall behind on heavily intersected subspaces") {
    double enhanced = 0.0, tsc = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(100 + seed);
      const auto ens = make_ensemble_fully_random(30, 3, 6, 5, rng);
      const DataMatrix d = sample_points(ens, 30, rng);
      Rng r1(seed), r2(seed);
      enhanced += clustering_accuracy(run_pipeline(d, 3, 3, {}, 5, r1).assignment.labels, *d.labels);
      tsc += clustering_accuracy(tsc_baseline(d, 3, 3, r2).labels, *d.labels);
    }
    INFO("enhanced ", enhanced / 10, " tsc ", tsc / 10);
    CHECK(enhanced > tsc);
  }
}
