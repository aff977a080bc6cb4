#pragma once

#include <span>
#include <string>
#include <vector>

#include "roomac/mds.hpp"
#include "roomac/psychoacoustics.hpp"

namespace roomac::stats {

struct CorrelationCell {
  double tau_b = 0;
  double p_value = 1;
  std::size_t n = 0;
};

// Kendall tau-b with tie correction. Two-sided p-value by exhaustive
// permutation enumeration for n <= 10, normal approximation with tie
// correction above. Throws "degenerate ranks" when either input is all tied.
CorrelationCell kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> row_labels;     // dimension1..dimensionD
  std::vector<std::string> column_labels;  // feature columns in table order
  std::vector<std::vector<CorrelationCell>> cells;
};

// Tau-b of every (MDS dimension, feature) pair. Embedding items and feature
// rows must correspond one-to-one by label (any order).
CorrelationMatrix correlation_matrix(const mds::Embedding& embedding,
                                     const psycho::FeatureTable& features);

// Long-form CSV: dimension,feature,tau_b,p_value,n.
std::string correlation_to_csv(const CorrelationMatrix& matrix);

}  // namespace roomac::stats
