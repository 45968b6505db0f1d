#include "imgio.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace afa {

namespace {

// sRGB <-> XYZ (D65) matrices and CIE Lab thresholds.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;
constexpr double kEps = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_linearize(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_delinearize(double c) {
  c = std::min(1.0, std::max(0.0, c));
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
  return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double f) {
  double f3 = f * f * f;
  return f3 > kEps ? f3 : (116.0 * f - 16.0) / kKappa;
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open file: " + path);
  return f;
}

Image rgb8_to_lab(int width, int height, const std::vector<uint8_t>& rgb) {
  Image img;
  img.width = width;
  img.height = height;
  img.lab.resize(size_t(width) * height * 3);
  for (size_t i = 0; i < size_t(width) * height; ++i) {
    double L, A, B;
    srgb_to_lab(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2], &L, &A, &B);
    img.lab[3 * i] = float(L);
    img.lab[3 * i + 1] = float(A);
    img.lab[3 * i + 2] = float(B);
  }
  return img;
}

Image load_png(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("png reader init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("png reader init failed");
  }
  std::vector<uint8_t> rgb;
  int width = 0, height = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt png: " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  width = int(png_get_image_width(png, info));
  height = int(png_get_image_height(png, info));
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  if (width <= 0 || height <= 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("zero-dimension png: " + path);
  }
  size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != size_t(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("unsupported png layout: " + path);
  }
  rgb.resize(size_t(width) * height * 3);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = rgb.data() + size_t(y) * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return rgb8_to_lab(width, height, rgb);
}

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(char(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(char(c));
  if (tok.empty()) throw DataError("truncated pnm header");
  return tok;
}

long pnm_int(std::istream& in) {
  std::string tok = pnm_token(in);
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw DataError("bad pnm header token: " + tok);
  }
  if (pos != tok.size()) throw DataError("bad pnm header token: " + tok);
  return v;
}

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string magic = pnm_token(in);
  if (magic != "P6") throw DataError("unsupported ppm magic: " + magic);
  long width = pnm_int(in);
  long height = pnm_int(in);
  long maxval = pnm_int(in);
  if (width <= 0 || height <= 0) throw DataError("zero-dimension ppm: " + path);
  if (maxval != 255) throw DataError("only 8-bit ppm supported: " + path);
  std::vector<uint8_t> rgb(size_t(width) * height * 3);
  in.read(reinterpret_cast<char*>(rgb.data()), std::streamsize(rgb.size()));
  if (size_t(in.gcount()) != rgb.size())
    throw DataError("truncated ppm: " + path);
  return rgb8_to_lab(int(width), int(height), rgb);
}

LabelMap load_pgm_labels(const std::string& path, int ew, int eh) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string magic = pnm_token(in);
  if (magic != "P5") throw DataError("unsupported pgm magic: " + magic);
  long width = pnm_int(in);
  long height = pnm_int(in);
  long maxval = pnm_int(in);
  if (width <= 0 || height <= 0) throw DataError("zero-dimension pgm: " + path);
  if (maxval <= 0 || maxval > 65535) throw DataError("bad pgm maxval: " + path);
  if ((ew >= 0 && width != ew) || (eh >= 0 && height != eh))
    throw DataError("label map dimensions do not match image: " + path);
  size_t n = size_t(width) * height;
  std::vector<int32_t> values(n);
  if (maxval > 255) {
    std::vector<uint8_t> raw(2 * n);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (size_t(in.gcount()) != raw.size())
      throw DataError("truncated pgm: " + path);
    for (size_t i = 0; i < n; ++i)
      values[i] = int32_t(raw[2 * i]) << 8 | int32_t(raw[2 * i + 1]);
  } else {
    std::vector<uint8_t> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (size_t(in.gcount()) != raw.size())
      throw DataError("truncated pgm: " + path);
    for (size_t i = 0; i < n; ++i) values[i] = raw[i];
  }
  return make_label_map(int(width), int(height), std::move(values));
}

LabelMap load_csv_labels(const std::string& path, int ew, int eh) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<int32_t> values;
  int width = -1, height = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    int row_width = int(cells.size());
    if (width < 0)
      width = row_width;
    else if (row_width != width)
      throw DataError("ragged csv label grid: " + path);
    for (auto& cell : cells) {
      std::string t = trim(cell);
      long v = 0;
      size_t pos = 0;
      try {
        v = std::stol(t, &pos);
      } catch (const std::exception&) {
        throw DataError("non-integer csv cell '" + t + "': " + path);
      }
      if (pos != t.size())
        throw DataError("non-integer csv cell '" + t + "': " + path);
      if (v < 0) throw DataError("negative label in csv: " + path);
      values.push_back(int32_t(v));
    }
    ++height;
  }
  if (width <= 0 || height <= 0) throw DataError("empty csv label grid: " + path);
  if ((ew >= 0 && width != ew) || (eh >= 0 && height != eh))
    throw DataError("label map dimensions do not match image: " + path);
  return make_label_map(width, height, std::move(values));
}

// BSD human segmentation files: a "key value" header terminated by a "data"
// line, then one "segment row col-start col-end" quad per line.
LabelMap load_seg_labels(const std::string& path, int ew, int eh) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  int width = -1, height = -1;
  std::string line;
  bool in_data = false;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t == "data") {
      in_data = true;
      break;
    }
    std::istringstream ls(t);
    std::string key;
    ls >> key;
    if (key == "width") ls >> width;
    if (key == "height") ls >> height;
  }
  if (!in_data || width <= 0 || height <= 0)
    throw DataError("malformed seg header: " + path);
  if ((ew >= 0 && width != ew) || (eh >= 0 && height != eh))
    throw DataError("label map dimensions do not match image: " + path);
  std::vector<int32_t> values(size_t(width) * height, -1);
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream ls(t);
    long seg, row, c0, c1;
    if (!(ls >> seg >> row >> c0 >> c1))
      throw DataError("malformed seg data line: " + path);
    if (seg < 0 || row < 0 || row >= height || c0 < 0 || c1 < c0 || c1 >= width)
      throw DataError("seg data out of range: " + path);
    for (long c = c0; c <= c1; ++c) values[size_t(row) * width + c] = int32_t(seg);
  }
  for (int32_t v : values)
    if (v < 0) throw DataError("seg file does not cover the image: " + path);
  return make_label_map(width, height, std::move(values));
}

}  // namespace

void srgb_to_lab(double r, double g, double b, double* L, double* A,
                 double* B) {
  double rl = srgb_linearize(r / 255.0);
  double gl = srgb_linearize(g / 255.0);
  double bl = srgb_linearize(b / 255.0);
  double X = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  double Y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  double Z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  double fx = lab_f(X / kXn);
  double fy = lab_f(Y / kYn);
  double fz = lab_f(Z / kZn);
  *L = 116.0 * fy - 16.0;
  *A = 500.0 * (fx - fy);
  *B = 200.0 * (fy - fz);
}

void lab_to_srgb(double L, double A, double B, double* r, double* g,
                 double* b) {
  double fy = (L + 16.0) / 116.0;
  double fx = fy + A / 500.0;
  double fz = fy - B / 200.0;
  double X = kXn * lab_f_inv(fx);
  double Y = kYn * lab_f_inv(fy);
  double Z = kZn * lab_f_inv(fz);
  double rl = 3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z;
  double gl = -0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z;
  double bl = 0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z;
  *r = 255.0 * srgb_delinearize(rl);
  *g = 255.0 * srgb_delinearize(gl);
  *b = 255.0 * srgb_delinearize(bl);
}

Image load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open file: " + path);
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
  if (magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
  throw DataError("unsupported image format (need png or ppm): " + path);
}

LabelMap make_label_map(int width, int height, std::vector<int32_t> values) {
  if (width <= 0 || height <= 0)
    throw DataError("zero-dimension label map");
  if (values.size() != size_t(width) * height)
    throw DataError("label buffer does not match dimensions");
  for (int32_t v : values)
    if (v < 0) throw DataError("negative label");
  LabelMap map;
  map.width = width;
  map.height = height;
  map.labels = std::move(values);
  map.num_labels = relabel_dense(map.labels);
  return map;
}

LabelMap read_label_map(const std::string& path, int expect_width,
                        int expect_height) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open file: " + path);
  std::string head(64, '\0');
  probe.read(head.data(), std::streamsize(head.size()));
  head.resize(size_t(probe.gcount()));
  probe.close();
  if (head.rfind("P5", 0) == 0)
    return load_pgm_labels(path, expect_width, expect_height);
  if (head.find("format") != std::string::npos &&
      head.find("ascii", head.find("format")) != std::string::npos)
    return load_seg_labels(path, expect_width, expect_height);
  return load_csv_labels(path, expect_width, expect_height);
}

void write_label_map_pgm(const LabelMap& map, const std::string& path) {
  if (map.num_labels > 65536)
    throw DataError("too many labels for 16-bit pgm output");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "P5\n" << map.width << " " << map.height << "\n65535\n";
  std::vector<uint8_t> raw(map.pixels() * 2);
  for (size_t i = 0; i < map.pixels(); ++i) {
    raw[2 * i] = uint8_t(map.labels[i] >> 8);
    raw[2 * i + 1] = uint8_t(map.labels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            std::streamsize(raw.size()));
  if (!out) throw DataError("write failed: " + path);
}

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb) {
  AFA_CHECK(rgb.size() == size_t(width) * height * 3, "rgb buffer size");
  FilePtr f = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("png writer init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("png writer init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(rgb.data() + size_t(y) * width * 3);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_overlay_png(const Image& image, const LabelMap& map,
                       const std::string& path) {
  if (image.width != map.width || image.height != map.height)
    throw DataError("overlay: image and label map dimensions differ");
  // Mean Lab per region, then one shared sRGB fill per region.
  std::vector<double> sums(size_t(map.num_labels) * 3, 0.0);
  std::vector<int64_t> counts(map.num_labels, 0);
  for (size_t i = 0; i < map.pixels(); ++i) {
    int32_t l = map.labels[i];
    sums[3 * l] += image.lab[3 * i];
    sums[3 * l + 1] += image.lab[3 * i + 1];
    sums[3 * l + 2] += image.lab[3 * i + 2];
    counts[l]++;
  }
  std::vector<uint8_t> fill(size_t(map.num_labels) * 3);
  for (int l = 0; l < map.num_labels; ++l) {
    double r, g, b;
    lab_to_srgb(sums[3 * l] / counts[l], sums[3 * l + 1] / counts[l],
                sums[3 * l + 2] / counts[l], &r, &g, &b);
    fill[3 * l] = uint8_t(std::lround(std::min(255.0, std::max(0.0, r))));
    fill[3 * l + 1] = uint8_t(std::lround(std::min(255.0, std::max(0.0, g))));
    fill[3 * l + 2] = uint8_t(std::lround(std::min(255.0, std::max(0.0, b))));
  }
  std::vector<uint8_t> rgb(map.pixels() * 3);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      size_t i = size_t(y) * map.width + x;
      int32_t l = map.labels[i];
      bool boundary =
          (x + 1 < map.width && map.at(x + 1, y) != l) ||
          (x > 0 && map.at(x - 1, y) != l) ||
          (y + 1 < map.height && map.at(x, y + 1) != l) ||
          (y > 0 && map.at(x, y - 1) != l);
      if (boundary) {
        rgb[3 * i] = 255;
        rgb[3 * i + 1] = 0;
        rgb[3 * i + 2] = 0;
      } else {
        rgb[3 * i] = fill[3 * l];
        rgb[3 * i + 1] = fill[3 * l + 1];
        rgb[3 * i + 2] = fill[3 * l + 2];
      }
    }
  }
  write_png_rgb(path, map.width, map.height, rgb);
}

}  // namespace afa
