#pragma once

#include <vector>

#include "ipursuit/datagen.hpp"
#include "ipursuit/linalg.hpp"

namespace ipursuit {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> hungarian_min_cost(const Matrix& cost);

// Best agreement fraction over all relabelings of `pred`.
double clustering_accuracy(const Labels& pred, const Labels& truth);

}  // namespace ipursuit
