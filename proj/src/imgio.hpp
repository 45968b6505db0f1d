// Raster image and label-map IO.
//
// Images are decoded from 8-bit sRGB PNG or binary PPM (P6) and stored as
// row-major CIELAB float triples (D65 white, 2 degree observer).  Label maps
// round-trip through 16-bit binary PGM (P5), CSV grids, and the BSD ".seg"
// ground-truth format; labels are always relabelled to a dense 0-based range
// ordered by first occurrence in raster order.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace afa {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> lab;  // width*height*3, row-major (L, a, b)

  bool empty() const { return width == 0 || height == 0; }
  size_t pixels() const { return size_t(width) * size_t(height); }
  const float* px(int x, int y) const {
    return lab.data() + 3 * (size_t(y) * width + x);
  }
  float* px(int x, int y) { return lab.data() + 3 * (size_t(y) * width + x); }
};

struct LabelMap {
  int width = 0;
  int height = 0;
  int num_labels = 0;
  std::vector<int32_t> labels;  // width*height, row-major, dense 0-based

  size_t pixels() const { return size_t(width) * size_t(height); }
  int32_t at(int x, int y) const { return labels[size_t(y) * width + x]; }
  int32_t& at(int x, int y) { return labels[size_t(y) * width + x]; }
};

// sRGB in [0,255] to CIELAB and back.  The inverse clamps to gamut.
void srgb_to_lab(double r, double g, double b, double* L, double* A, double* B);
void lab_to_srgb(double L, double A, double B, double* r, double* g, double* b);

// Decodes PNG or PPM (detected from the file magic) into Lab.
// Throws DataError on unreadable, truncated, or zero-dimension input.
Image load_image(const std::string& path);

// Builds a LabelMap from raw values (any integers), densifying labels.
LabelMap make_label_map(int width, int height, std::vector<int32_t> values);

// Reads a label map from 8/16-bit PGM (P5), a CSV grid, or a BSD ".seg"
// file (detected from content).  Throws DataError on ragged rows, negative
// labels, or dimension mismatch against expect_* when those are >= 0.
LabelMap read_label_map(const std::string& path, int expect_width = -1,
                        int expect_height = -1);

// Writes a label map as 16-bit binary PGM.  Requires num_labels <= 65536.
void write_label_map_pgm(const LabelMap& map, const std::string& path);

// Writes a PNG visualisation: each region filled with its mean colour,
// region boundaries drawn in red.
void write_overlay_png(const Image& image, const LabelMap& map,
                       const std::string& path);

// 8-bit RGB PNG writer used by the overlay and available for debug dumps.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb);

}  // namespace afa
