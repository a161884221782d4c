#include "ipursuit/metrics.hpp"

#include <algorithm>
#include <limits>

#include "ipursuit/error.hpp"

namespace ipursuit {

std::vector<int> hungarian_min_cost(const Matrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw Error(ErrorCode::ShapeMismatch, "Hungarian method needs a square matrix");
  // Potentials formulation, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[static_cast<std::size_t>(p[j] - 1)] = static_cast<int>(j - 1);
  return assignment;
}

double clustering_accuracy(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "prediction and truth lengths differ");
  if (pred.empty()) return 1.0;
  int classes = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || truth[i] < 0) throw Error(ErrorCode::InvalidArgument, "labels must be nonnegative");
    classes = std::max({classes, pred[i] + 1, truth[i] + 1});
  }
  Matrix counts = Matrix::Zero(classes, classes);
  for (std::size_t i = 0; i < pred.size(); ++i) counts(pred[i], truth[i]) += 1.0;
  const std::vector<int> match = hungarian_min_cost(-counts);
  double agree = 0.0;
  for (int r = 0; r < classes; ++r) agree += counts(r, match[static_cast<std::size_t>(r)]);
  return agree / static_cast<double>(pred.size());
}

}  // namespace ipursuit
