#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roomac::mds {

// Per-subject ordinal pairwise dissimilarities over n items. Each subject
// holds n(n-1)/2 ratings in [1, 7], stored upper-triangular row-major
// (pair (i, j) with i < j at pair_index(i, j, n)).
struct RatingSet {
  std::vector<std::string> items;
  std::vector<std::vector<double>> subjects;

  std::size_t item_count() const { return items.size(); }
  std::size_t pair_count() const { return items.size() * (items.size() - 1) / 2; }
  void validate() const;
};

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);

// CSV with header subject_id,item_a,item_b,rating.
RatingSet ratings_from_csv(const std::string& text);
std::string ratings_to_csv(const RatingSet& ratings);

enum class TiePolicy {
  Primary,    // tied ratings may receive different disparities
  Secondary,  // tied ratings share one disparity
};

// Pool-adjacent-violators: least-squares fit to `distances` under weak
// monotonicity in the order of `dissimilarities`.
std::vector<double> monotone_regression(const std::vector<double>& dissimilarities,
                                        const std::vector<double>& distances,
                                        TiePolicy ties = TiePolicy::Primary);

struct Embedding {
  std::vector<std::string> items;
  std::vector<std::vector<double>> coords;  // n x d, column means 0
  int dimension = 0;
  std::vector<double> per_subject_stress1;
  double aggregate_stress1 = 0;  // RMS over subjects
  std::vector<double> per_subject_rsq;
  double mean_rsq = 0;
  // Optimizer objective after each majorization+regression iteration of the
  // winning start; non-increasing by construction.
  std::vector<double> objective_trace;
};

struct FitOptions {
  int restarts = 20;  // random starts in addition to the classical-scaling start
  std::uint64_t seed = 1;
  int max_iterations = 500;
  double rel_tolerance = 1e-7;
  TiePolicy ties = TiePolicy::Primary;
  int jobs = 1;  // parallelism across restarts; does not affect results
};

// Replicated nonmetric MDS: one shared configuration, per-subject disparities
// via monotone regression, majorization updates of the configuration.
// STRESS-1 uses Kruskal's definition sqrt(sum (d - dhat)^2 / sum d^2).
Embedding fit_mds(const RatingSet& ratings, int dimension, const FitOptions& options = {});

// Independent MDS per subject, for comparison against the replicated model.
std::vector<Embedding> fit_mds_per_subject(const RatingSet& ratings, int dimension,
                                           const FitOptions& options = {});

struct SweepRow {
  int dimension;
  double aggregate_stress1;
  double mean_rsq;
};

std::vector<SweepRow> dimension_sweep(const RatingSet& ratings, int d_max,
                                      const FitOptions& options = {});

// Fit label for a STRESS-1 value: >= 0.2 Poor, [0.1, 0.2) Fair,
// [0.05, 0.1) Good, (0, 0.05) Excellent, 0 Perfect. Throws on negative input.
std::string classify_stress(double stress1);

}  // namespace roomac::mds
