// Segmentation quality metrics against one or more human annotations.
//
// Rand index, variation of information, and consistency error all run on
// label contingency tables; boundary displacement error runs on an exact
// Euclidean distance transform of the boundary sets.  Multi-annotation
// scores are the mean of the per-annotation scores.
#pragma once

#include <vector>

#include "imgio.hpp"

namespace afa {

struct MetricReport {
  double pri = 0.0;
  double voi = 0.0;
  double gce = 0.0;
  double bde = 0.0;
  // One entry per annotation (nested breakdowns stay empty); the top-level
  // scores are the means of these.
  std::vector<MetricReport> per_annotation;
};

// Joint label-count table: cell (i, j) counts pixels labelled i by `a`
// and j by `b`.
std::vector<std::vector<int64_t>> contingency(const LabelMap& a,
                                              const LabelMap& b);

// Probabilistic Rand index in [0, 1]; 1 means every annotation agrees on
// every pixel pair.
double pri(const LabelMap& seg, const std::vector<LabelMap>& truths);

// Variation of information, >= 0; natural log by default, bits on request.
double voi(const LabelMap& seg, const std::vector<LabelMap>& truths,
           bool log_base2 = false);

// Global consistency error in [0, 1]; 0 when either map refines the other.
double gce(const LabelMap& seg, const std::vector<LabelMap>& truths);

// Mean boundary displacement in pixels.  Boundaries are pixels whose right
// or bottom neighbour has a different label; a single-label map contributes
// the image border as its boundary.
double bde(const LabelMap& seg, const std::vector<LabelMap>& truths);

MetricReport evaluate(const LabelMap& seg, const std::vector<LabelMap>& truths,
                      bool voi_log_base2 = false);

// Boundary mask per the convention above (row-major bytes, 1 = boundary).
std::vector<uint8_t> boundary_mask(const LabelMap& map);

// Exact Euclidean distance (in pixels) from every pixel to the nearest
// set pixel of `mask`; infinity when the mask is empty.
std::vector<double> distance_transform(const std::vector<uint8_t>& mask,
                                       int width, int height);

}  // namespace afa
