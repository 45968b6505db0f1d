#include "helpers.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace testhelp {
namespace {

// Two colour families (warm left, cool right), four related shades each.
// Shades change per horizontal band; the within-family Lab distances stay
// well below the between-family distance, so coarse scales merge bands
// while fine scales keep them apart.
const int kBandRgb[2][4][3] = {
    {{200, 60, 40}, {215, 80, 55}, {185, 45, 55}, {225, 70, 30}},
    {{40, 80, 200}, {55, 95, 215}, {30, 65, 185}, {60, 110, 225}}};

}  // namespace

PlantedBipartite planted_bipartite(uint64_t seed, int max_x, int max_y) {
  afa::SplitMix64 rng(seed);
  PlantedBipartite out;
  out.blocks = 2 + int(rng.next_u64() % 2);
  int nx = std::max(out.blocks * 2,
                    out.blocks + int(rng.next_u64() % uint64_t(max_x)));
  int ny = std::max(out.blocks,
                    out.blocks + int(rng.next_u64() % uint64_t(max_y)));
  nx = std::min(nx, max_x);
  ny = std::min(ny, max_y);

  std::vector<int> bx(nx), by(ny);
  for (int i = 0; i < nx; ++i)
    bx[i] = i < out.blocks ? i : int(rng.next_u64() % uint64_t(out.blocks));
  for (int j = 0; j < ny; ++j)
    by[j] = j < out.blocks ? j : int(rng.next_u64() % uint64_t(out.blocks));

  out.b.resize(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double w = bx[i] == by[j] ? 1.0 + 0.2 * rng.next_double()
                                : 0.03 + 0.02 * rng.next_double();
      out.b(i, j) = w;
    }
  return out;
}

std::vector<uint8_t> banded16_rgb() {
  std::vector<uint8_t> rgb(16 * 16 * 3);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const int* c = kBandRgb[x < 8 ? 0 : 1][y / 4];
      uint8_t* p = rgb.data() + 3 * (y * 16 + x);
      p[0] = uint8_t(c[0]);
      p[1] = uint8_t(c[1]);
      p[2] = uint8_t(c[2]);
    }
  return rgb;
}

afa::Image banded16() {
  std::vector<uint8_t> rgb = banded16_rgb();
  afa::Image img;
  img.width = 16;
  img.height = 16;
  img.lab.resize(16 * 16 * 3);
  for (int i = 0; i < 16 * 16; ++i) {
    double L, A, B;
    afa::srgb_to_lab(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2], &L, &A, &B);
    img.lab[3 * i] = float(L);
    img.lab[3 * i + 1] = float(A);
    img.lab[3 * i + 2] = float(B);
  }
  return img;
}

afa::LabelMap banded16_truth() {
  std::vector<int32_t> labels(16 * 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) labels[y * 16 + x] = x < 8 ? 0 : 1;
  return afa::make_label_map(16, 16, std::move(labels));
}

std::string make_temp_dir(const std::string& hint) {
  static std::atomic<int> counter{0};
  fs::path base = fs::temp_directory_path() /
                  ("afa_test_" + hint + "_" + std::to_string(getpid()) + "_" +
                   std::to_string(counter++));
  fs::create_directories(base);
  return base.string();
}

void remove_tree(const std::string& path) {
  std::error_code ec;
  fs::remove_all(path, ec);
}

void make_mini_dataset(const std::string& dir,
                       const std::vector<std::string>& stems) {
  fs::create_directories(fs::path(dir) / "images");
  afa::Image img = banded16();
  std::vector<uint8_t> rgb = banded16_rgb();
  afa::LabelMap truth = banded16_truth();
  for (const std::string& stem : stems) {
    afa::write_png_rgb((fs::path(dir) / "images" / (stem + ".png")).string(),
                       16, 16, rgb);
    fs::path gt_dir = fs::path(dir) / "groundtruth" / stem;
    fs::create_directories(gt_dir);
    afa::write_label_map_pgm(truth, (gt_dir / "human.pgm").string());
  }
}

int run_command(const std::string& command, std::string* output) {
  std::string line = command + " 2>&1";
  FILE* pipe = popen(line.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + command);
  std::string captured;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0)
    captured.append(buf, got);
  int status = pclose(pipe);
  if (output) *output = captured;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testhelp
