#include "metrics.hpp"

#include <cmath>
#include <limits>

namespace afa {

namespace {

void require_same_shape(const LabelMap& a, const LabelMap& b) {
  if (a.width != b.width || a.height != b.height)
    throw DataError("metrics: label map dimensions differ");
}

void require_truths(const std::vector<LabelMap>& truths) {
  if (truths.empty()) throw DataError("metrics: no annotations given");
}

double choose2(int64_t n) { return 0.5 * double(n) * double(n - 1); }

// Rand index of one pair from its contingency table.
double rand_index(const LabelMap& a, const LabelMap& b) {
  auto table = contingency(a, b);
  int64_t n = int64_t(a.pixels());
  std::vector<int64_t> row(a.num_labels, 0), col(b.num_labels, 0);
  double same_same = 0.0;
  for (int i = 0; i < a.num_labels; ++i)
    for (int j = 0; j < b.num_labels; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
      same_same += choose2(table[i][j]);
    }
  double pairs = choose2(n);
  double sum_row = 0.0, sum_col = 0.0;
  for (int64_t v : row) sum_row += choose2(v);
  for (int64_t v : col) sum_col += choose2(v);
  double diff_diff = pairs - sum_row - sum_col + same_same;
  return pairs > 0.0 ? (same_same + diff_diff) / pairs : 1.0;
}

double voi_single(const LabelMap& a, const LabelMap& b, bool log_base2) {
  auto table = contingency(a, b);
  double n = double(a.pixels());
  std::vector<int64_t> row(a.num_labels, 0), col(b.num_labels, 0);
  for (int i = 0; i < a.num_labels; ++i)
    for (int j = 0; j < b.num_labels; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  auto xlogx = [log_base2](double p) {
    if (p <= 0.0) return 0.0;
    return log_base2 ? p * std::log2(p) : p * std::log(p);
  };
  double h1 = 0.0, h2 = 0.0, mi = 0.0;
  for (int64_t v : row) h1 -= xlogx(double(v) / n);
  for (int64_t v : col) h2 -= xlogx(double(v) / n);
  for (int i = 0; i < a.num_labels; ++i)
    for (int j = 0; j < b.num_labels; ++j) {
      double pij = double(table[i][j]) / n;
      if (pij > 0.0) {
        double pi = double(row[i]) / n;
        double pj = double(col[j]) / n;
        double ratio = pij / (pi * pj);
        mi += pij * (log_base2 ? std::log2(ratio) : std::log(ratio));
      }
    }
  double v = h1 + h2 - 2.0 * mi;
  return v < 0.0 ? 0.0 : v;  // guard the rounding of an exact match
}

double gce_single(const LabelMap& a, const LabelMap& b) {
  auto table = contingency(a, b);
  double n = double(a.pixels());
  std::vector<int64_t> row(a.num_labels, 0), col(b.num_labels, 0);
  for (int i = 0; i < a.num_labels; ++i)
    for (int j = 0; j < b.num_labels; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  // Pixel-summed local refinement error in each direction; the per-pixel
  // error with labels (i, j) is (|R_a| - n_ij) / |R_a| and symmetrically.
  double e_ab = 0.0, e_ba = 0.0;
  for (int i = 0; i < a.num_labels; ++i)
    for (int j = 0; j < b.num_labels; ++j) {
      double nij = double(table[i][j]);
      if (nij == 0.0) continue;
      e_ab += nij * (double(row[i]) - nij) / double(row[i]);
      e_ba += nij * (double(col[j]) - nij) / double(col[j]);
    }
  return std::min(e_ab, e_ba) / n;
}

// Large finite stand-in for "no feature here"; any real squared distance
// displaces it and the parabola arithmetic stays finite.
constexpr double kFar = 1e100;

// 1-D squared distance transform (lower envelope of parabolas).
void dt_1d(const double* f, double* out, int n, std::vector<int>& v,
           std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double d = double(q) - v[k];
    out[q] = d * d + f[v[k]];
  }
}

double bde_single(const LabelMap& a, const LabelMap& b) {
  auto mask_a = boundary_mask(a);
  auto mask_b = boundary_mask(b);
  auto dist_to_b = distance_transform(mask_b, a.width, a.height);
  auto dist_to_a = distance_transform(mask_a, a.width, a.height);
  double sum_ab = 0.0, sum_ba = 0.0;
  int64_t count_a = 0, count_b = 0;
  for (size_t i = 0; i < mask_a.size(); ++i) {
    if (mask_a[i]) {
      sum_ab += dist_to_b[i];
      ++count_a;
    }
    if (mask_b[i]) {
      sum_ba += dist_to_a[i];
      ++count_b;
    }
  }
  AFA_CHECK(count_a > 0 && count_b > 0, "bde: empty boundary set");
  return 0.5 * (sum_ab / double(count_a) + sum_ba / double(count_b));
}

}  // namespace

std::vector<std::vector<int64_t>> contingency(const LabelMap& a,
                                              const LabelMap& b) {
  require_same_shape(a, b);
  std::vector<std::vector<int64_t>> table(
      a.num_labels, std::vector<int64_t>(b.num_labels, 0));
  for (size_t i = 0; i < a.pixels(); ++i) table[a.labels[i]][b.labels[i]]++;
  return table;
}

double pri(const LabelMap& seg, const std::vector<LabelMap>& truths) {
  require_truths(truths);
  double acc = 0.0;
  for (const auto& t : truths) acc += rand_index(seg, t);
  return acc / double(truths.size());
}

double voi(const LabelMap& seg, const std::vector<LabelMap>& truths,
           bool log_base2) {
  require_truths(truths);
  double acc = 0.0;
  for (const auto& t : truths) acc += voi_single(seg, t, log_base2);
  return acc / double(truths.size());
}

double gce(const LabelMap& seg, const std::vector<LabelMap>& truths) {
  require_truths(truths);
  double acc = 0.0;
  for (const auto& t : truths) acc += gce_single(seg, t);
  return acc / double(truths.size());
}

double bde(const LabelMap& seg, const std::vector<LabelMap>& truths) {
  require_truths(truths);
  double acc = 0.0;
  for (const auto& t : truths) {
    require_same_shape(seg, t);
    acc += bde_single(seg, t);
  }
  return acc / double(truths.size());
}

MetricReport evaluate(const LabelMap& seg, const std::vector<LabelMap>& truths,
                      bool voi_log_base2) {
  MetricReport r;
  r.pri = pri(seg, truths);
  r.voi = voi(seg, truths, voi_log_base2);
  r.gce = gce(seg, truths);
  r.bde = bde(seg, truths);
  for (const LabelMap& t : truths) {
    std::vector<LabelMap> one{t};
    MetricReport p;
    p.pri = pri(seg, one);
    p.voi = voi(seg, one, voi_log_base2);
    p.gce = gce(seg, one);
    p.bde = bde(seg, one);
    r.per_annotation.push_back(std::move(p));
  }
  return r;
}

std::vector<uint8_t> boundary_mask(const LabelMap& map) {
  std::vector<uint8_t> mask(map.pixels(), 0);
  bool any = false;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      int32_t l = map.at(x, y);
      bool edge = (x + 1 < map.width && map.at(x + 1, y) != l) ||
                  (y + 1 < map.height && map.at(x, y + 1) != l);
      if (edge) {
        mask[size_t(y) * map.width + x] = 1;
        any = true;
      }
    }
  if (!any) {
    // A single-label map scores against the image border.
    for (int x = 0; x < map.width; ++x) {
      mask[x] = 1;
      mask[size_t(map.height - 1) * map.width + x] = 1;
    }
    for (int y = 0; y < map.height; ++y) {
      mask[size_t(y) * map.width] = 1;
      mask[size_t(y) * map.width + map.width - 1] = 1;
    }
  }
  return mask;
}

std::vector<double> distance_transform(const std::vector<uint8_t>& mask,
                                       int width, int height) {
  AFA_CHECK(mask.size() == size_t(width) * height, "distance_transform: size");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (uint8_t m : mask)
    if (m) {
      any = true;
      break;
    }
  if (!any) return std::vector<double>(mask.size(), kInf);

  std::vector<double> sq(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) sq[i] = mask[i] ? 0.0 : kFar;

  int longest = std::max(width, height);
  std::vector<double> f(longest), out(longest), z(longest + 2);
  std::vector<int> v(longest);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f[x] = sq[size_t(y) * width + x];
    dt_1d(f.data(), out.data(), width, v, z);
    for (int x = 0; x < width; ++x) sq[size_t(y) * width + x] = out[x];
  }
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) f[y] = sq[size_t(y) * width + x];
    dt_1d(f.data(), out.data(), height, v, z);
    for (int y = 0; y < height; ++y) sq[size_t(y) * width + x] = out[y];
  }
  std::vector<double> dist(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) dist[i] = std::sqrt(sq[i]);
  return dist;
}

}  // namespace afa
