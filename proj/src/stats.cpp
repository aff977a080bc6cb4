#include "roomac/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "util.hpp"

namespace roomac::stats {

namespace {

// P - Q via the sign table; O(n^2) but exact and tiny for study-sized n.
long long concordance_sum(const std::vector<int>& sx, const std::vector<int>& sy,
                          std::size_t n) {
  long long s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += sx[i * n + j] * sy[i * n + j];
  return s;
}

std::vector<int> sign_table(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<int> s(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s[i * n + j] = v[j] > v[i] ? 1 : (v[j] < v[i] ? -1 : 0);
  return s;
}

// Tie-group sizes of a sequence.
std::vector<std::size_t> tie_groups(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> groups;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > 1) groups.push_back(j - i);
    i = j;
  }
  return groups;
}

double exact_p_value(std::span<const double> x, std::span<const double> y, long long s_obs) {
  const std::size_t n = x.size();
  const auto sx = sign_table(x);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t total = 0, as_extreme = 0;
  const long long threshold = std::llabs(s_obs);
  do {
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double yi = y[perm[i]], yj = y[perm[j]];
        const int sy = yj > yi ? 1 : (yj < yi ? -1 : 0);
        s += sx[i * n + j] * sy;
      }
    }
    ++total;
    if (std::llabs(s) >= threshold) ++as_extreme;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(as_extreme) / static_cast<double>(total);
}

double normal_p_value(std::span<const double> x, std::span<const double> y, long long s_obs) {
  const double n = static_cast<double>(x.size());
  const auto gx = tie_groups(x);
  const auto gy = tie_groups(y);
  const double v0 = n * (n - 1.0) * (2.0 * n + 5.0);
  double vt = 0.0, vu = 0.0;
  for (std::size_t t : gx) {
    const double td = static_cast<double>(t);
    vt += td * (td - 1.0) * (2.0 * td + 5.0);
  }
  for (std::size_t u : gy) {
    const double ud = static_cast<double>(u);
    vu += ud * (ud - 1.0) * (2.0 * ud + 5.0);
  }
  double t1 = 0.0, u1 = 0.0, t2 = 0.0, u2 = 0.0;
  for (std::size_t t : gx) {
    const double td = static_cast<double>(t);
    t1 += td * (td - 1.0);
    t2 += td * (td - 1.0) * (td - 2.0);
  }
  for (std::size_t u : gy) {
    const double ud = static_cast<double>(u);
    u1 += ud * (ud - 1.0);
    u2 += ud * (ud - 1.0) * (ud - 2.0);
  }
  const double var = (v0 - vt - vu) / 18.0 + t2 * u2 / (9.0 * n * (n - 1.0) * (n - 2.0)) +
                     t1 * u1 / (2.0 * n * (n - 1.0));
  if (var <= 0.0) return 1.0;
  const double z = static_cast<double>(s_obs) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

CorrelationCell kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("sequences must have equal length");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("need at least 3 observations");

  const auto sx = sign_table(x);
  const auto sy = sign_table(y);
  long long s = 0;        // P - Q
  long long pq_x = 0;     // pairs not tied in x
  long long pq_y = 0;     // pairs not tied in y
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int a = sx[i * n + j], b = sy[i * n + j];
      s += a * b;
      pq_x += a != 0;
      pq_y += b != 0;
    }
  if (pq_x == 0 || pq_y == 0) throw std::invalid_argument("degenerate ranks");

  CorrelationCell cell;
  cell.n = n;
  cell.tau_b = static_cast<double>(s) /
               std::sqrt(static_cast<double>(pq_x) * static_cast<double>(pq_y));
  cell.p_value = n <= 10 ? exact_p_value(x, y, s) : normal_p_value(x, y, s);
  return cell;
}

CorrelationMatrix correlation_matrix(const mds::Embedding& embedding,
                                     const psycho::FeatureTable& features) {
  const std::size_t n = embedding.items.size();
  if (features.rows.size() != n)
    throw std::invalid_argument("embedding and feature table have different item counts");
  std::map<std::string, std::size_t> by_label;
  for (std::size_t r = 0; r < features.rows.size(); ++r) {
    if (!by_label.emplace(features.rows[r].stimulus, r).second)
      throw std::invalid_argument("duplicate feature row: " + features.rows[r].stimulus);
  }
  std::vector<std::size_t> row_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = by_label.find(embedding.items[i]);
    if (it == by_label.end())
      throw std::invalid_argument("no feature row for item: " + embedding.items[i]);
    row_of[i] = it->second;
  }

  static const char* kColumns[12] = {"N",   "S",    "R_S",  "R_B", "F", "K",
                                     "C",   "RT30", "RT20", "EDT", "E", "D"};
  auto column_value = [](const psycho::FeatureVector& f, int c) {
    switch (c) {
      case 0: return f.loudness_db;
      case 1: return f.sharpness_acum;
      case 2: return f.roughness_sottek;
      case 3: return f.roughness_hb;
      case 4: return f.fluctuation;
      case 5: return f.tonality_tu;
      case 6: return f.centroid_hz;
      case 7: return f.rt30_s;
      case 8: return f.rt20_s;
      case 9: return f.edt_s;
      case 10: return f.echo_density;
      default: return f.correlation_dim;
    }
  };

  CorrelationMatrix m;
  m.column_labels.assign(kColumns, kColumns + 12);
  for (int dim = 0; dim < embedding.dimension; ++dim)
    m.row_labels.push_back("dimension" + std::to_string(dim + 1));

  m.cells.resize(static_cast<std::size_t>(embedding.dimension));
  for (int dim = 0; dim < embedding.dimension; ++dim) {
    std::vector<double> coord(n), feature(n);
    for (std::size_t i = 0; i < n; ++i) coord[i] = embedding.coords[i][static_cast<std::size_t>(dim)];
    auto& row = m.cells[static_cast<std::size_t>(dim)];
    row.resize(12);
    for (int c = 0; c < 12; ++c) {
      for (std::size_t i = 0; i < n; ++i) feature[i] = column_value(features.rows[row_of[i]], c);
      row[static_cast<std::size_t>(c)] = kendall_tau_b(coord, feature);
    }
  }
  return m;
}

std::string correlation_to_csv(const CorrelationMatrix& matrix) {
  std::string out = "dimension,feature,tau_b,p_value,n\n";
  for (std::size_t r = 0; r < matrix.cells.size(); ++r)
    for (std::size_t c = 0; c < matrix.cells[r].size(); ++c) {
      const auto& cell = matrix.cells[r][c];
      out += matrix.row_labels[r] + ',' + matrix.column_labels[c] + ',' +
             util::format_double(cell.tau_b) + ',' + util::format_double(cell.p_value) + ',' +
             std::to_string(cell.n) + '\n';
    }
  return out;
}

}  // namespace roomac::stats
