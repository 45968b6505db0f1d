#include "features.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace afa {

namespace {

// Normalised 5-tap Gaussian, sigma 1.
std::array<double, 5> gauss5_sigma1() {
  std::array<double, 5> k;
  double sum = 0.0;
  for (int i = -2; i <= 2; ++i) {
    k[i + 2] = std::exp(-0.5 * i * i);
    sum += k[i + 2];
  }
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

Eigen::MatrixXd mlab(const Image& image, const SuperpixelScale& scale) {
  if (image.width != scale.labels.width || image.height != scale.labels.height)
    throw DataError("mlab: image and scale dimensions differ");
  int n = scale.count();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(3, n);
  for (size_t i = 0; i < image.pixels(); ++i) {
    int32_t l = scale.labels.labels[i];
    F(0, l) += image.lab[3 * i];
    F(1, l) += image.lab[3 * i + 1];
    F(2, l) += image.lab[3 * i + 2];
  }
  for (int j = 0; j < n; ++j) F.col(j) /= double(scale.areas[j]);
  return F;
}

Eigen::MatrixXd ikde_smooth(const Eigen::MatrixXd& features, double alpha,
                            std::span<const int> ordering) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("ikde_smooth: alpha must lie in (0,1]");
  int n = int(features.cols());
  if (!ordering.empty() && int(ordering.size()) != n)
    throw DataError("ikde_smooth: ordering length mismatch");
  Eigen::MatrixXd out = features;
  if (alpha == 1.0) return out;
  Eigen::Vector3d prev;
  for (int t = 0; t < n; ++t) {
    int col = ordering.empty() ? t : ordering[t];
    if (t == 0) {
      prev = out.col(col);
      continue;
    }
    out.col(col) = alpha * features.col(col) + (1.0 - alpha) * prev;
    prev = out.col(col);
  }
  return out;
}

Eigen::MatrixXd feature_gaussian(const Eigen::MatrixXd& features) {
  auto k = gauss5_sigma1();
  int n = int(features.cols());
  Eigen::MatrixXd out = features;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(features.rows());
    double wsum = 0.0;
    for (int i = -2; i <= 2; ++i) {
      int jj = j + i;
      if (jj < 0 || jj >= n) continue;  // renormalised at the borders
      acc += k[i + 2] * features.col(jj);
      wsum += k[i + 2];
    }
    out.col(j) = acc / wsum;
  }
  return out;
}

Eigen::MatrixXd feature_bilateral(const Eigen::MatrixXd& features) {
  constexpr double kSigma = 5.0;
  int n = int(features.cols());
  Eigen::MatrixXd out = features;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(features.rows());
    double wsum = 0.0;
    for (int i = -2; i <= 2; ++i) {
      int jj = j + i;
      if (jj < 0 || jj >= n) continue;
      double range2 = (features.col(jj) - features.col(j)).squaredNorm();
      double w = std::exp(-0.5 * (i * i) / (kSigma * kSigma)) *
                 std::exp(-0.5 * range2 / (kSigma * kSigma));
      acc += w * features.col(jj);
      wsum += w;
    }
    out.col(j) = acc / wsum;
  }
  return out;
}

Image image_gaussian_5x5(const Image& image) {
  auto k = gauss5_sigma1();
  int w = image.width, h = image.height;
  auto clampi = [](int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); };
  Image tmp = image, out = image;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i)
          acc += k[i + 2] * image.px(clampi(x + i, 0, w - 1), y)[c];
        tmp.px(x, y)[c] = float(acc);
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i)
          acc += k[i + 2] * tmp.px(x, clampi(y + i, 0, h - 1))[c];
        out.px(x, y)[c] = float(acc);
      }
  return out;
}

Image image_bilateral_5x5(const Image& image) {
  constexpr double kSigma = 5.0;
  int w = image.width, h = image.height;
  Image out = image;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float* center = image.px(x, y);
      double acc[3] = {0, 0, 0};
      double wsum = 0.0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
          int xx = x + dx, yy = y + dy;
          if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
          const float* p = image.px(xx, yy);
          double range2 = 0.0;
          for (int c = 0; c < 3; ++c) {
            double d = double(p[c]) - center[c];
            range2 += d * d;
          }
          double wgt = std::exp(-0.5 * (dx * dx + dy * dy) / (kSigma * kSigma)) *
                       std::exp(-0.5 * range2 / (kSigma * kSigma));
          for (int c = 0; c < 3; ++c) acc[c] += wgt * p[c];
          wsum += wgt;
        }
      for (int c = 0; c < 3; ++c) out.px(x, y)[c] = float(acc[c] / wsum);
    }
  return out;
}

Image image_ikde(const Image& image, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("image_ikde: alpha must lie in (0,1]");
  Image out = image;
  if (alpha == 1.0) return out;
  for (int c = 0; c < 3; ++c) {
    double prev = out.lab[c];
    for (size_t i = 1; i < image.pixels(); ++i) {
      double v = alpha * image.lab[3 * i + c] + (1.0 - alpha) * prev;
      out.lab[3 * i + c] = float(v);
      prev = v;
    }
  }
  return out;
}

Image denoise_image(const Image& image, DenoiseMode mode, double alpha) {
  switch (mode) {
    case DenoiseMode::kNone:
      return image;
    case DenoiseMode::kGaussian:
      return image_gaussian_5x5(image);
    case DenoiseMode::kBilateral:
      return image_bilateral_5x5(image);
    case DenoiseMode::kIkde:
      return image_ikde(image, alpha);
  }
  throw InternalError("denoise_image: bad mode");
}

Eigen::MatrixXd denoise_features(const Eigen::MatrixXd& features,
                                 DenoiseMode mode, double alpha) {
  switch (mode) {
    case DenoiseMode::kNone:
      return features;
    case DenoiseMode::kGaussian:
      return feature_gaussian(features);
    case DenoiseMode::kBilateral:
      return feature_bilateral(features);
    case DenoiseMode::kIkde:
      return ikde_smooth(features, alpha);
  }
  throw InternalError("denoise_features: bad mode");
}

}  // namespace afa
