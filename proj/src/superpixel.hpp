// Graph-based oversegmentation and the multi-scale superpixel stack.
//
// The native oversegmenter is the greedy union-find region grower of
// Felzenszwalb and Huttenlocher: 8-connected pixel edges weighted by Lab
// distance, processed in ascending weight order against an adaptive
// per-component threshold k/|C|, followed by a small-component merge pass.
// Scales can also be ingested from external label maps.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "imgio.hpp"

namespace afa {

struct FhParams {
  double k = 100.0;      // region-size preference
  int min_size = 20;     // post-merge floor on component size
  double sigma = 0.8;    // Gaussian pre-smoothing (0 disables)
};

struct SuperpixelScale {
  int scale_id = 0;
  LabelMap labels;                       // dense 0-based superpixel ids
  std::vector<std::vector<int>> adjacency;  // sorted 4-connected neighbours
  std::vector<int64_t> areas;            // pixel count per superpixel
  int count() const { return labels.num_labels; }
};

// One scale is either a native FH setting or an external label-map path.
using ScaleSpec = std::variant<FhParams, std::string>;

struct ScaleStack {
  int width = 0;
  int height = 0;
  std::vector<SuperpixelScale> scales;
};

// Separable Gaussian smoothing of the Lab channels, replicated borders.
// Kernel radius ceil(4*sigma), matching the oversegmenter's preprocessing.
Image gaussian_smooth(const Image& image, double sigma);

// Runs FH on the image.  Deterministic: equal-weight edges are processed in
// (source index, target index) order.  Every output component has at least
// min_size pixels.
LabelMap fh_segment(const Image& image, const FhParams& params);

// Derives adjacency lists and areas from a dense label map (4-connectivity).
SuperpixelScale make_scale(int scale_id, LabelMap labels);

// Builds the multi-scale stack; external maps must match the image size.
ScaleStack build_stack(const Image& image, const std::vector<ScaleSpec>& specs);

}  // namespace afa
