// Superpixel features and noise smoothing.
//
// Each superpixel is described by its mean Lab colour.  The default smoother
// is a first-order exponential filter over the superpixel sequence
// (f_in[t] = alpha*f[t] + (1-alpha)*f_in[t-1]); alpha = 1 keeps features
// bit-identical to the raw means.  Fixed-window Gaussian and bilateral
// filters are available as comparison baselines, on images or on features.
#pragma once

#include <Eigen/Dense>
#include <span>

#include "superpixel.hpp"

namespace afa {

enum class DenoiseMode { kNone, kGaussian, kBilateral, kIkde };
enum class DenoiseTarget { kImage, kFeature };

// 3 x N matrix of per-superpixel mean Lab colours.
Eigen::MatrixXd mlab(const Image& image, const SuperpixelScale& scale);

// Exponential smoothing along the column sequence.  `ordering` optionally
// permutes the visit order; columns are written back in place.  alpha must
// lie in (0, 1].  alpha = 1 returns an exact copy of the input.
Eigen::MatrixXd ikde_smooth(const Eigen::MatrixXd& features, double alpha,
                            std::span<const int> ordering = {});

// 5-tap Gaussian (sigma 1) over the feature sequence, per row.
Eigen::MatrixXd feature_gaussian(const Eigen::MatrixXd& features);

// 5-tap bilateral filter over the feature sequence: spatial and range
// widths both 5, range distance is the Euclidean feature distance.
Eigen::MatrixXd feature_bilateral(const Eigen::MatrixXd& features);

// Image-space versions of the baselines: 5x5 Gaussian (sigma 1), 5x5
// bilateral (spatial and range widths 5), and the exponential smoother
// applied over pixels in raster order.
Image image_gaussian_5x5(const Image& image);
Image image_bilateral_5x5(const Image& image);
Image image_ikde(const Image& image, double alpha);

Image denoise_image(const Image& image, DenoiseMode mode, double alpha);
Eigen::MatrixXd denoise_features(const Eigen::MatrixXd& features,
                                 DenoiseMode mode, double alpha);

}  // namespace afa
