#include "roomac/mds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "util.hpp"

namespace roomac::mds {

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= j || j >= n) throw std::invalid_argument("pair_index requires i < j < n");
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

void RatingSet::validate() const {
  if (items.size() < 2) throw std::invalid_argument("need at least 2 items");
  if (subjects.empty()) throw std::invalid_argument("need at least 1 subject");
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    if (subjects[s].size() != pair_count())
      throw std::invalid_argument("subject " + std::to_string(s) + " has " +
                                  std::to_string(subjects[s].size()) + " ratings, expected " +
                                  std::to_string(pair_count()));
    for (double r : subjects[s])
      if (!(r >= 1.0 && r <= 7.0))
        throw std::invalid_argument("rating out of range [1, 7]: " + util::format_double(r));
  }
}

RatingSet ratings_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty ratings CSV");
  if (line != "subject_id,item_a,item_b,rating")
    throw std::invalid_argument("unexpected ratings CSV header: " + line);

  std::vector<std::string> items;
  std::map<std::string, std::size_t> item_index;
  std::vector<std::string> subject_ids;
  std::map<std::string, std::size_t> subject_index;
  struct Entry {
    std::size_t subject, a, b;
    double rating;
  };
  std::vector<Entry> entries;

  auto intern = [](std::vector<std::string>& names, std::map<std::string, std::size_t>& index,
                   const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    index.emplace(name, names.size());
    names.push_back(name);
    return names.size() - 1;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string subject, a, b, rating;
    if (!std::getline(row, subject, ',') || !std::getline(row, a, ',') ||
        !std::getline(row, b, ',') || !std::getline(row, rating))
      throw std::invalid_argument("malformed ratings row: " + line);
    if (a == b) throw std::invalid_argument("self-pair in ratings: " + line);
    entries.push_back({intern(subject_ids, subject_index, subject),
                       intern(items, item_index, a), intern(items, item_index, b),
                       util::parse_double(rating)});
  }

  RatingSet rs;
  rs.items = items;
  const std::size_t n = items.size();
  const std::size_t n_pairs = n * (n - 1) / 2;
  rs.subjects.assign(subject_ids.size(), std::vector<double>(n_pairs, -1.0));
  for (const auto& e : entries) {
    const std::size_t i = std::min(e.a, e.b), j = std::max(e.a, e.b);
    double& slot = rs.subjects[e.subject][pair_index(i, j, n)];
    if (slot >= 0.0)
      throw std::invalid_argument("duplicate rating for pair (" + items[i] + ", " + items[j] +
                                  ") of subject " + subject_ids[e.subject]);
    slot = e.rating;
  }
  for (std::size_t s = 0; s < rs.subjects.size(); ++s)
    for (double r : rs.subjects[s])
      if (r < 0.0)
        throw std::invalid_argument("subject " + subject_ids[s] + " is missing pair ratings");
  rs.validate();
  return rs;
}

std::string ratings_to_csv(const RatingSet& ratings) {
  ratings.validate();
  std::string out = "subject_id,item_a,item_b,rating\n";
  const std::size_t n = ratings.items.size();
  for (std::size_t s = 0; s < ratings.subjects.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        out += "s" + std::to_string(s + 1) + ',' + ratings.items[i] + ',' + ratings.items[j] +
               ',' + util::format_double(ratings.subjects[s][pair_index(i, j, n)]) + '\n';
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pool adjacent violators.

namespace {

// Non-decreasing least-squares fit of y with weights w.
std::vector<double> pava(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> value(n), weight(n);
  std::vector<std::size_t> size(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    value[blocks] = y[i];
    weight[blocks] = w[i];
    size[blocks] = 1;
    ++blocks;
    while (blocks > 1 && value[blocks - 2] > value[blocks - 1]) {
      const double tw = weight[blocks - 2] + weight[blocks - 1];
      value[blocks - 2] =
          (value[blocks - 2] * weight[blocks - 2] + value[blocks - 1] * weight[blocks - 1]) / tw;
      weight[blocks - 2] = tw;
      size[blocks - 2] += size[blocks - 1];
      --blocks;
    }
  }
  std::vector<double> out(n);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < size[b]; ++k) out[pos++] = value[b];
  return out;
}

}  // namespace

std::vector<double> monotone_regression(const std::vector<double>& dissimilarities,
                                        const std::vector<double>& distances, TiePolicy ties) {
  if (dissimilarities.size() != distances.size())
    throw std::invalid_argument("dissimilarities and distances must have equal length");
  const std::size_t n = distances.size();
  if (n == 0) return {};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  if (ties == TiePolicy::Primary) {
    // Untie within blocks: sorting tied ratings by distance lets PAVA leave
    // them unconstrained against each other.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (dissimilarities[a] != dissimilarities[b])
        return dissimilarities[a] < dissimilarities[b];
      return distances[a] < distances[b];
    });
    std::vector<double> y(n), w(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) y[k] = distances[order[k]];
    const auto fitted = pava(y, w);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[order[k]] = fitted[k];
    return out;
  }

  // Secondary: one disparity per tie block, fitted to the block mean.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dissimilarities[a] < dissimilarities[b];
  });
  std::vector<double> block_mean, block_weight;
  std::vector<std::size_t> block_of(n);
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k;
    double sum = 0.0;
    while (end < n && dissimilarities[order[end]] == dissimilarities[order[k]]) {
      sum += distances[order[end]];
      ++end;
    }
    const std::size_t count = end - k;
    for (std::size_t t = k; t < end; ++t) block_of[order[t]] = block_mean.size();
    block_mean.push_back(sum / static_cast<double>(count));
    block_weight.push_back(static_cast<double>(count));
    k = end;
  }
  const auto fitted = pava(block_mean, block_weight);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fitted[block_of[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Replicated nonmetric MDS by majorization.

namespace {

// Cyclic Jacobi eigendecomposition of a small symmetric matrix; returns
// eigenvalues (descending) and matching eigenvectors as columns.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
  const std::size_t n = a.size();
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
          eigenvectors[i][p] = c * vip - s * viq;
          eigenvectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }

  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return eigenvalues[x] > eigenvalues[y]; });
  std::vector<double> ev(n);
  std::vector<std::vector<double>> vec(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    ev[k] = eigenvalues[order[k]];
    for (std::size_t i = 0; i < n; ++i) vec[i][k] = eigenvectors[i][order[k]];
  }
  eigenvalues = std::move(ev);
  eigenvectors = std::move(vec);
}

using Matrix = std::vector<std::vector<double>>;

void center_columns(Matrix& x) {
  if (x.empty()) return;
  const std::size_t n = x.size(), d = x.front().size();
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i][k];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i][k] -= mean;
  }
}

std::vector<double> pair_distances(const Matrix& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n * (n - 1) / 2);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) {
        const double diff = x[i][k] - x[j][k];
        sum += diff * diff;
      }
      d[p++] = std::sqrt(sum);
    }
  return d;
}

// Classical (Torgerson) scaling of the mean dissimilarity matrix.
Matrix classical_init(const RatingSet& ratings, int dimension) {
  const std::size_t n = ratings.item_count();
  Matrix delta(n, std::vector<double>(n, 0.0));
  for (const auto& subject : ratings.subjects) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r = subject[pair_index(i, j, n)];
        delta[i][j] += r;
        delta[j][i] += r;
      }
  }
  const double inv_s = 1.0 / static_cast<double>(ratings.subjects.size());
  Matrix b(n, std::vector<double>(n));
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = delta[i][j] * inv_s;
      b[i][j] = d * d;
      row_mean[i] += b[i][j];
      grand += b[i][j];
    }
  for (auto& v : row_mean) v /= static_cast<double>(n);
  grand /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b[i][j] = -0.5 * (b[i][j] - row_mean[i] - row_mean[j] + grand);

  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  jacobi_eigen(b, eigenvalues, eigenvectors);

  Matrix x(n, std::vector<double>(static_cast<std::size_t>(dimension), 0.0));
  for (int k = 0; k < dimension; ++k) {
    const double lambda = k < static_cast<int>(eigenvalues.size())
                              ? std::max(eigenvalues[static_cast<std::size_t>(k)], 0.0)
                              : 0.0;
    const double scale = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i)
      x[i][static_cast<std::size_t>(k)] =
          scale * (k < static_cast<int>(n) ? eigenvectors[i][static_cast<std::size_t>(k)] : 0.0);
  }
  center_columns(x);
  return x;
}

Matrix random_init(std::size_t n, int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Matrix x(n, std::vector<double>(static_cast<std::size_t>(dimension)));
  for (auto& row : x)
    for (auto& v : row) v = uni(rng);
  center_columns(x);
  return x;
}

struct FitResult {
  Matrix coords;
  std::vector<double> per_subject_stress1;
  double aggregate_stress1 = 0;
  std::vector<double> per_subject_rsq;
  double mean_rsq = 0;
  std::vector<double> objective_trace;
};

double pearson_rsq(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return (cov * cov) / (va * vb);
}

FitResult fit_from_start(const RatingSet& ratings, Matrix x, const FitOptions& options) {
  const std::size_t n = ratings.item_count();
  const std::size_t n_pairs = ratings.pair_count();
  const std::size_t n_subj = ratings.subjects.size();
  const double sphere = static_cast<double>(n_pairs);

  FitResult result;
  std::vector<std::vector<double>> disparities(n_subj, std::vector<double>(n_pairs));
  std::vector<double> mean_disp(n_pairs);
  double prev_objective = std::numeric_limits<double>::infinity();

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const auto d = pair_distances(x);

    // Disparities: monotone regression per subject, then scaled onto the
    // fixed sphere sum(dhat^2) = n_pairs, which keeps the alternating
    // updates monotone in the objective.
    double objective = 0.0;
    for (std::size_t s = 0; s < n_subj; ++s) {
      auto fit = monotone_regression(ratings.subjects[s], d, options.ties);
      double norm = 0.0;
      for (double v : fit) norm += v * v;
      const double scale = norm > 0.0 ? std::sqrt(sphere / norm) : 1.0;
      for (std::size_t p = 0; p < n_pairs; ++p) {
        disparities[s][p] = fit[p] * scale;
        const double diff = disparities[s][p] - d[p];
        objective += diff * diff;
      }
    }
    objective /= static_cast<double>(n_subj) * sphere;
    result.objective_trace.push_back(objective);

    if (prev_objective - objective <= options.rel_tolerance * std::max(prev_objective, 1e-12) &&
        iteration > 0)
      break;
    prev_objective = objective;

    for (std::size_t p = 0; p < n_pairs; ++p) {
      double sum = 0.0;
      for (std::size_t s = 0; s < n_subj; ++s) sum += disparities[s][p];
      mean_disp[p] = sum / static_cast<double>(n_subj);
    }

    // Guttman transform with unit weights.
    Matrix next(n, std::vector<double>(x.front().size(), 0.0));
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        const double ratio = d[p] > 1e-15 ? mean_disp[p] / d[p] : 0.0;
        for (std::size_t k = 0; k < x[i].size(); ++k) {
          const double pull = ratio * (x[i][k] - x[j][k]);
          next[i][k] += pull;
          next[j][k] -= pull;
        }
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < next[i].size(); ++k) next[i][k] *= inv_n;
    x = std::move(next);
  }

  center_columns(x);
  const auto d = pair_distances(x);
  double denom = 0.0;
  for (double v : d) denom += v * v;

  result.per_subject_stress1.resize(n_subj);
  result.per_subject_rsq.resize(n_subj);
  double stress_sq_sum = 0.0, rsq_sum = 0.0;
  for (std::size_t s = 0; s < n_subj; ++s) {
    const auto dhat = monotone_regression(ratings.subjects[s], d, options.ties);
    double num = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const double diff = d[p] - dhat[p];
      num += diff * diff;
    }
    const double stress = denom > 0.0 ? std::sqrt(num / denom) : 1.0;
    result.per_subject_stress1[s] = stress;
    stress_sq_sum += stress * stress;
    result.per_subject_rsq[s] = pearson_rsq(d, dhat);
    rsq_sum += result.per_subject_rsq[s];
  }
  result.aggregate_stress1 = std::sqrt(stress_sq_sum / static_cast<double>(n_subj));
  result.mean_rsq = rsq_sum / static_cast<double>(n_subj);
  result.coords = std::move(x);
  return result;
}

}  // namespace

Embedding fit_mds(const RatingSet& ratings, int dimension, const FitOptions& options) {
  ratings.validate();
  const std::size_t n = ratings.item_count();
  if (dimension < 1 || dimension > static_cast<int>(n) - 1)
    throw std::invalid_argument("dimension must be in [1, n-1]");

  bool any_variance = false;
  for (const auto& subject : ratings.subjects)
    for (double r : subject)
      if (r != subject.front()) any_variance = true;
  if (!any_variance) throw std::invalid_argument("zero-variance ratings");

  const int n_starts = options.restarts + 1;
  std::vector<FitResult> results(static_cast<std::size_t>(n_starts));
  util::parallel_for(static_cast<std::size_t>(n_starts), options.jobs, [&](std::size_t start) {
    Matrix init = start == 0
                      ? classical_init(ratings, dimension)
                      : random_init(n, dimension,
                                    util::derive_seed(options.seed,
                                                      static_cast<std::uint64_t>(dimension),
                                                      static_cast<std::uint64_t>(start)));
    results[start] = fit_from_start(ratings, std::move(init), options);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s)
    if (results[s].aggregate_stress1 < results[best].aggregate_stress1) best = s;

  Embedding e;
  e.items = ratings.items;
  e.dimension = dimension;
  e.coords = std::move(results[best].coords);
  e.per_subject_stress1 = std::move(results[best].per_subject_stress1);
  e.aggregate_stress1 = results[best].aggregate_stress1;
  e.per_subject_rsq = std::move(results[best].per_subject_rsq);
  e.mean_rsq = results[best].mean_rsq;
  e.objective_trace = std::move(results[best].objective_trace);
  return e;
}

std::vector<Embedding> fit_mds_per_subject(const RatingSet& ratings, int dimension,
                                           const FitOptions& options) {
  ratings.validate();
  std::vector<Embedding> out;
  for (const auto& subject : ratings.subjects) {
    RatingSet single;
    single.items = ratings.items;
    single.subjects.push_back(subject);
    out.push_back(fit_mds(single, dimension, options));
  }
  return out;
}

std::vector<SweepRow> dimension_sweep(const RatingSet& ratings, int d_max,
                                      const FitOptions& options) {
  ratings.validate();
  if (d_max < 1 || d_max > static_cast<int>(ratings.item_count()) - 1)
    throw std::invalid_argument("d_max must be in [1, n-1]");
  std::vector<SweepRow> rows;
  for (int d = 1; d <= d_max; ++d) {
    const auto e = fit_mds(ratings, d, options);
    rows.push_back({d, e.aggregate_stress1, e.mean_rsq});
  }
  return rows;
}

std::string classify_stress(double stress1) {
  if (stress1 < 0.0) throw std::invalid_argument("stress must be non-negative");
  if (stress1 >= 0.2) return "Poor";
  if (stress1 >= 0.1) return "Fair";
  if (stress1 >= 0.05) return "Good";
  if (stress1 > 0.0) return "Excellent";
  return "Perfect";
}

}  // namespace roomac::mds
