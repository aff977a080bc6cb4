#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "roomac/mds.hpp"

using namespace roomac;
using mds::RatingSet;
using mds::TiePolicy;

namespace {

using Matrix = std::vector<std::vector<double>>;

// Exhaustive least-squares isotonic fit: every contiguous block partition
// whose block means are non-decreasing.
std::vector<double> brute_force_isotonic(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> best;
  double best_sse = 1e300;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    double prev_mean = -1e300;
    bool monotone = true;
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool boundary = (i == n - 1) || (mask & (1u << i));
      if (!boundary) continue;
      double mean = 0.0;
      for (std::size_t k = start; k <= i; ++k) mean += y[k];
      mean /= static_cast<double>(i - start + 1);
      if (mean < prev_mean) {
        monotone = false;
        break;
      }
      for (std::size_t k = start; k <= i; ++k) fit[k] = mean;
      prev_mean = mean;
      start = i + 1;
    }
    if (!monotone) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (y[i] - fit[i]) * (y[i] - fit[i]);
    if (sse < best_sse - 1e-12) {
      best_sse = sse;
      best = fit;
    }
  }
  return best;
}

std::vector<double> config_distances(const Matrix& x) {
  const std::size_t n = x.size();
  std::vector<double> d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k)
        s += (x[i][k] - x[j][k]) * (x[i][k] - x[j][k]);
      d.push_back(std::sqrt(s));
    }
  return d;
}

// Ratings proportional to the configuration distances, mapped into [1, 7].
RatingSet ratings_from_config(const Matrix& x, int subjects = 1) {
  RatingSet rs;
  for (std::size_t i = 0; i < x.size(); ++i) rs.items.push_back("i" + std::to_string(i + 1));
  const auto d = config_distances(x);
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  std::vector<double> scaled(d.size());
  for (std::size_t p = 0; p < d.size(); ++p)
    scaled[p] = 1.0 + 6.0 * (d[p] - *lo) / (*hi - *lo);
  for (int s = 0; s < subjects; ++s) rs.subjects.push_back(scaled);
  return rs;
}

Matrix random_config(std::size_t n, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Matrix x(n, std::vector<double>(dims));
  for (auto& row : x)
    for (auto& v : row) v = uni(rng);
  return x;
}

// Jacobi eigendecomposition for the tiny matrices in the Procrustes helper.
void tiny_eigen(Matrix a, std::vector<double>& values, Matrix& vectors) {
  const std::size_t n = a.size();
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 60; ++sweep) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-15) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
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
          const double vip = vectors[i][p], viq = vectors[i][q];
          vectors[i][p] = c * vip - s * viq;
          vectors[i][q] = s * vip + c * viq;
        }
      }
  }
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

// RMS residual after the best similarity transform (rotation, reflection,
// translation, scale) of `got` onto `want`.
double procrustes_rms(Matrix got, Matrix want) {
  const std::size_t n = got.size(), d = got.front().size();
  for (Matrix* m : {&got, &want}) {
    for (std::size_t k = 0; k < d; ++k) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += (*m)[i][k];
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) (*m)[i][k] -= mean;
    }
  }
  // Cross-covariance C = got^T want, then R = U V^T from its SVD.
  Matrix c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) c[a][b] += got[i][a] * want[i][b];

  Matrix ctc(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t k = 0; k < d; ++k) ctc[a][b] += c[k][a] * c[k][b];
  std::vector<double> lambda;
  Matrix v;
  tiny_eigen(ctc, lambda, v);

  Matrix u(d, std::vector<double>(d, 0.0));
  double trace_sigma = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double sigma = std::sqrt(std::max(lambda[k], 0.0));
    trace_sigma += sigma;
    if (sigma < 1e-12) continue;
    for (std::size_t a = 0; a < d; ++a) {
      double cv = 0.0;
      for (std::size_t b = 0; b < d; ++b) cv += c[a][b] * v[b][k];
      u[a][k] = cv / sigma;
    }
  }
  Matrix r(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t k = 0; k < d; ++k) r[a][b] += u[a][k] * v[b][k];

  double got_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) got_norm += got[i][a] * got[i][a];
  const double scale = got_norm > 0.0 ? trace_sigma / got_norm : 1.0;

  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < d; ++b) {
      double aligned = 0.0;
      for (std::size_t a = 0; a < d; ++a) aligned += scale * got[i][a] * r[a][b];
      sse += (aligned - want[i][b]) * (aligned - want[i][b]);
    }
  return std::sqrt(sse / static_cast<double>(n));
}

double kruskal_stress(const Matrix& coords, const std::vector<double>& ratings) {
  const auto d = config_distances(coords);
  const auto dhat = mds::monotone_regression(ratings, d);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < d.size(); ++p) {
    num += (d[p] - dhat[p]) * (d[p] - dhat[p]);
    den += d[p] * d[p];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("mds") {

TEST_CASE("monotone regression basics") {
  CHECK(mds::monotone_regression({1, 2, 3}, {1.0, 2.0, 3.0}) ==
        std::vector<double>{1.0, 2.0, 3.0});
  CHECK(mds::monotone_regression({1, 2, 3}, {3.0, 1.0, 2.0}) ==
        std::vector<double>{2.0, 2.0, 2.0});
  CHECK(mds::monotone_regression({5}, {4.2}) == std::vector<double>{4.2});
  CHECK(mds::monotone_regression({}, {}).empty());
}

TEST_CASE("monotone regression matches exhaustive search on short sequences") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<double> dissim(n), dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dissim[i] = static_cast<double>(i + 1);  // strict order, no ties
      dist[i] = uni(rng);
    }
    const auto got = mds::monotone_regression(dissim, dist);
    const auto want = brute_force_isotonic(dist);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("tie handling: primary may split ties, secondary must not") {
  const std::vector<double> dissim = {1, 1, 2};
  const std::vector<double> dist = {0.5, 1.5, 2.0};
  const auto primary = mds::monotone_regression(dissim, dist, TiePolicy::Primary);
  CHECK(primary == std::vector<double>{0.5, 1.5, 2.0});  // untied within the block
  const auto secondary = mds::monotone_regression(dissim, dist, TiePolicy::Secondary);
  CHECK(secondary[0] == doctest::Approx(1.0));
  CHECK(secondary[1] == doctest::Approx(1.0));
  CHECK(secondary[2] == doctest::Approx(2.0));
}

TEST_CASE("ratings CSV round trip and validation") {
  const Matrix truth = random_config(4, 2, 72);
  RatingSet rs = ratings_from_config(truth, 2);
  const std::string csv = mds::ratings_to_csv(rs);
  const RatingSet back = mds::ratings_from_csv(csv);
  CHECK(back.items == rs.items);
  REQUIRE(back.subjects.size() == rs.subjects.size());
  for (std::size_t s = 0; s < rs.subjects.size(); ++s)
    CHECK(back.subjects[s] == rs.subjects[s]);

  SUBCASE("missing pair is rejected") {
    const std::string partial =
        "subject_id,item_a,item_b,rating\ns1,a,b,3\ns1,a,c,4\n";  // misses (b, c)
    CHECK_THROWS_WITH_AS(mds::ratings_from_csv(partial), doctest::Contains("missing"),
                         std::invalid_argument);
  }
  SUBCASE("out-of-range rating is rejected") {
    const std::string bad = "subject_id,item_a,item_b,rating\ns1,a,b,9\n";
    CHECK_THROWS_WITH_AS(mds::ratings_from_csv(bad), doctest::Contains("out of range"),
                         std::invalid_argument);
  }
  SUBCASE("duplicate pair is rejected") {
    const std::string dup = "subject_id,item_a,item_b,rating\ns1,a,b,3\ns1,b,a,4\n";
    CHECK_THROWS_WITH_AS(mds::ratings_from_csv(dup), doctest::Contains("duplicate"),
                         std::invalid_argument);
  }
}

TEST_CASE("exact distances of a 9-point 2-D configuration are recovered") {
  const Matrix truth = random_config(9, 2, 73);
  const RatingSet rs = ratings_from_config(truth);
  mds::FitOptions options;
  options.seed = 7;
  const auto e = mds::fit_mds(rs, 2, options);

  CHECK(e.aggregate_stress1 < 0.01);
  CHECK(e.per_subject_stress1.size() == 1);
  CHECK(e.mean_rsq > 0.999);

  const auto d = config_distances(truth);
  const double diameter = *std::max_element(d.begin(), d.end());
  CHECK(procrustes_rms(e.coords, truth) < 0.01 * diameter);
}

TEST_CASE("a 1-D embedding of 2-D data strains more than the 2-D one") {
  const Matrix truth = random_config(9, 2, 74);
  const RatingSet rs = ratings_from_config(truth);
  mds::FitOptions options;
  options.seed = 8;
  const auto e1 = mds::fit_mds(rs, 1, options);
  const auto e2 = mds::fit_mds(rs, 2, options);
  CHECK(e1.aggregate_stress1 > e2.aggregate_stress1);
}

TEST_CASE("aggregate stress is the RMS of the per-subject values") {
  const Matrix truth = random_config(9, 2, 75);
  RatingSet rs = ratings_from_config(truth, 11);
  // Independent ordinal noise per subject.
  std::mt19937_64 rng(76);
  std::uniform_int_distribution<int> bump(-1, 1);
  for (auto& subject : rs.subjects)
    for (double& r : subject) r = std::clamp(r + bump(rng), 1.0, 7.0);

  mds::FitOptions options;
  options.restarts = 5;
  options.seed = 9;
  const auto e = mds::fit_mds(rs, 2, options);
  REQUIRE(e.per_subject_stress1.size() == 11);
  double sq = 0.0, rsq = 0.0;
  for (double s : e.per_subject_stress1) sq += s * s;
  for (double r : e.per_subject_rsq) rsq += r;
  CHECK(e.aggregate_stress1 == doctest::Approx(std::sqrt(sq / 11.0)).epsilon(1e-12));
  CHECK(e.mean_rsq == doctest::Approx(rsq / 11.0).epsilon(1e-12));
}

TEST_CASE("optimizer objective never increases along the trace") {
  const Matrix truth = random_config(9, 3, 77);
  RatingSet rs = ratings_from_config(truth, 5);
  std::mt19937_64 rng(78);
  std::uniform_int_distribution<int> bump(-1, 1);
  for (auto& subject : rs.subjects)
    for (double& r : subject) r = std::clamp(r + bump(rng), 1.0, 7.0);

  mds::FitOptions options;
  options.restarts = 2;
  options.seed = 10;
  const auto e = mds::fit_mds(rs, 2, options);
  REQUIRE(e.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < e.objective_trace.size(); ++i)
    CHECK(e.objective_trace[i] <= e.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("coordinates come out centered") {
  const Matrix truth = random_config(7, 2, 79);
  const auto e = mds::fit_mds(ratings_from_config(truth), 2, {});
  for (int k = 0; k < 2; ++k) {
    double mean = 0.0;
    for (const auto& row : e.coords) mean += row[static_cast<std::size_t>(k)];
    CHECK(std::abs(mean / static_cast<double>(e.coords.size())) < 1e-9);
  }
}

TEST_CASE("stress-1 is invariant under similarity transforms of the configuration") {
  const Matrix truth = random_config(8, 2, 80);
  RatingSet rs = ratings_from_config(truth);
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<int> bump(-1, 1);
  for (double& r : rs.subjects[0]) r = std::clamp(r + bump(rng), 1.0, 7.0);

  const auto base = kruskal_stress(truth, rs.subjects[0]);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = angle(rng), s = scale_dist(rng);
    const double tx = shift(rng), ty = shift(rng);
    const double reflect = (trial % 2 == 0) ? 1.0 : -1.0;
    Matrix moved = truth;
    for (auto& row : moved) {
      const double x = row[0], y = row[1];
      row[0] = s * (std::cos(a) * x - std::sin(a) * y) + tx;
      row[1] = reflect * s * (std::sin(a) * x + std::cos(a) * y) + ty;
    }
    CHECK(kruskal_stress(moved, rs.subjects[0]) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("zero-variance ratings are rejected") {
  RatingSet rs;
  rs.items = {"a", "b", "c"};
  rs.subjects.push_back({4.0, 4.0, 4.0});
  CHECK_THROWS_WITH_AS(mds::fit_mds(rs, 1, {}), doctest::Contains("zero-variance"),
                       std::invalid_argument);
}

TEST_CASE("dimension sweep: elbow at the generating dimensionality") {
  const Matrix truth = random_config(9, 3, 82);
  RatingSet rs = ratings_from_config(truth, 11);
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> bump(-1, 1);
  for (auto& subject : rs.subjects)
    for (double& r : subject) r = std::clamp(r + bump(rng), 1.0, 7.0);

  mds::FitOptions options;
  options.restarts = 10;
  options.seed = 11;
  const auto rows = mds::dimension_sweep(rs, 6, options);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].aggregate_stress1 <= rows[i - 1].aggregate_stress1 + 0.005);
  // Steep drop through d=3, flat afterwards.
  CHECK(rows[0].aggregate_stress1 - rows[2].aggregate_stress1 >
        3.0 * (rows[2].aggregate_stress1 - rows[5].aggregate_stress1));

  const auto single = mds::dimension_sweep(rs, 1, options);
  CHECK(single.size() == 1);
}

TEST_CASE("per-subject mode returns one embedding per subject") {
  const Matrix truth = random_config(6, 2, 84);
  RatingSet rs = ratings_from_config(truth, 3);
  mds::FitOptions options;
  options.restarts = 3;
  const auto all = mds::fit_mds_per_subject(rs, 2, options);
  CHECK(all.size() == 3);
  for (const auto& e : all) CHECK(e.per_subject_stress1.size() == 1);
}

TEST_CASE("stress classification follows the published thresholds") {
  CHECK(mds::classify_stress(0.2) == "Poor");
  CHECK(mds::classify_stress(0.35) == "Poor");
  CHECK(mds::classify_stress(0.1) == "Fair");
  CHECK(mds::classify_stress(0.05) == "Good");
  CHECK(mds::classify_stress(0.025) == "Excellent");
  CHECK(mds::classify_stress(0.0) == "Perfect");
  CHECK_THROWS_AS(mds::classify_stress(-0.1), std::invalid_argument);
}

}  // TEST_SUITE
