#include "superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afa {

namespace {

struct Edge {
  float w;
  int32_t a;
  int32_t b;
};

// Union-find with size tracking and the adaptive FH threshold per root.
class Forest {
 public:
  explicit Forest(int n, double k) : parent_(n), size_(n, 1), threshold_(n, k) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      int next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  // Joins the components of a and b; keeps the smaller root index as the
  // representative so the result does not depend on union order internals.
  int join(int a, int b) {
    int keep = std::min(a, b);
    int drop = std::max(a, b);
    parent_[drop] = keep;
    size_[keep] += size_[drop];
    return keep;
  }
  int size(int x) const { return size_[x]; }
  double threshold(int x) const { return threshold_[x]; }
  void set_threshold(int x, double t) { threshold_[x] = t; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<double> threshold_;
};

float lab_dist(const float* p, const float* q) {
  double d0 = double(p[0]) - q[0];
  double d1 = double(p[1]) - q[1];
  double d2 = double(p[2]) - q[2];
  return float(std::sqrt(d0 * d0 + d1 * d1 + d2 * d2));
}

std::vector<Edge> build_edges(const Image& img) {
  int w = img.width, h = img.height;
  std::vector<Edge> edges;
  edges.reserve(size_t(w) * h * 4);
  auto add = [&](int x0, int y0, int x1, int y1) {
    int32_t a = int32_t(y0) * w + x0;
    int32_t b = int32_t(y1) * w + x1;
    edges.push_back({lab_dist(img.px(x0, y0), img.px(x1, y1)), a, b});
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) add(x, y, x + 1, y);
      if (y + 1 < h) add(x, y, x, y + 1);
      if (x + 1 < w && y + 1 < h) add(x, y, x + 1, y + 1);
      if (x + 1 < w && y > 0) add(x, y, x + 1, y - 1);
    }
  }
  return edges;
}

}  // namespace

Image gaussian_smooth(const Image& image, double sigma) {
  if (sigma <= 0.0) return image;
  int radius = std::max(1, int(std::ceil(4.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& v : kernel) v /= sum;

  int w = image.width, h = image.height;
  Image tmp = image, out = image;
  auto clampi = [](int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * image.px(clampi(x + i, 0, w - 1), y)[c];
        tmp.px(x, y)[c] = float(acc);
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * tmp.px(x, clampi(y + i, 0, h - 1))[c];
        out.px(x, y)[c] = float(acc);
      }
  return out;
}

LabelMap fh_segment(const Image& image, const FhParams& params) {
  if (image.empty()) throw DataError("fh_segment: empty image");
  if (params.k <= 0 || params.min_size < 1)
    throw ConfigError("fh_segment: k must be > 0 and min_size >= 1");
  Image smoothed = gaussian_smooth(image, params.sigma);
  std::vector<Edge> edges = build_edges(smoothed);
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    if (l.w != r.w) return l.w < r.w;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  int n = int(image.pixels());
  Forest forest(n, params.k);
  for (const Edge& e : edges) {
    int a = forest.find(e.a);
    int b = forest.find(e.b);
    if (a == b) continue;
    if (e.w <= forest.threshold(a) && e.w <= forest.threshold(b)) {
      int root = forest.join(a, b);
      forest.set_threshold(root, double(e.w) + params.k / forest.size(root));
    }
  }
  // One ascending pass removes all undersized components: the first edge
  // leaving a small component is its cheapest link to a neighbour.
  for (const Edge& e : edges) {
    int a = forest.find(e.a);
    int b = forest.find(e.b);
    if (a != b &&
        (forest.size(a) < params.min_size || forest.size(b) < params.min_size))
      forest.join(a, b);
  }
  std::vector<int32_t> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = forest.find(i);
  return make_label_map(image.width, image.height, std::move(labels));
}

SuperpixelScale make_scale(int scale_id, LabelMap labels) {
  SuperpixelScale scale;
  scale.scale_id = scale_id;
  int n = labels.num_labels;
  scale.areas.assign(n, 0);
  for (int32_t l : labels.labels) scale.areas[l]++;

  std::vector<std::vector<int>> adj(n);
  auto link = [&adj](int32_t a, int32_t b) {
    if (a == b) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int y = 0; y < labels.height; ++y)
    for (int x = 0; x < labels.width; ++x) {
      if (x + 1 < labels.width) link(labels.at(x, y), labels.at(x + 1, y));
      if (y + 1 < labels.height) link(labels.at(x, y), labels.at(x, y + 1));
    }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  scale.adjacency = std::move(adj);
  scale.labels = std::move(labels);
  return scale;
}

ScaleStack build_stack(const Image& image,
                       const std::vector<ScaleSpec>& specs) {
  if (image.empty()) throw DataError("build_stack: empty image");
  if (specs.empty()) throw ConfigError("build_stack: no scales configured");
  ScaleStack stack;
  stack.width = image.width;
  stack.height = image.height;
  stack.scales.reserve(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    LabelMap labels;
    if (std::holds_alternative<FhParams>(specs[i])) {
      labels = fh_segment(image, std::get<FhParams>(specs[i]));
    } else {
      labels = read_label_map(std::get<std::string>(specs[i]), image.width,
                              image.height);
    }
    stack.scales.push_back(make_scale(int(i), std::move(labels)));
  }
  return stack;
}

}  // namespace afa
