// Synthetic inputs and process plumbing shared by the unit and acceptance
// suites.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "imgio.hpp"

namespace testhelp {

// Random bipartite weight matrix with planted block structure: X and Y
// nodes are assigned to `blocks` groups, within-group weights are strong,
// cross-group weights weak but positive (no zero degrees).  Sizes vary
// with the seed, every block owns at least one node on each side.
struct PlantedBipartite {
  Eigen::MatrixXd b;
  int blocks = 0;
};
PlantedBipartite planted_bipartite(uint64_t seed, int max_x, int max_y);

// 16x16 two-region image: left and right halves drawn from two distinct
// colour families, each half striped into four horizontal bands so every
// oversegmentation scale yields several superpixels per side.  The default
// pipeline separates the halves exactly.
afa::Image banded16();
std::vector<uint8_t> banded16_rgb();     // 16*16*3 sRGB bytes
afa::LabelMap banded16_truth();          // left half 0, right half 1

// Fresh directory under the system temp root; never reused across calls.
std::string make_temp_dir(const std::string& hint);
void remove_tree(const std::string& path);

// Benchmark-layout dataset built from copies of the banded image:
// <dir>/images/<stem>.png and <dir>/groundtruth/<stem>/human.pgm.
void make_mini_dataset(const std::string& dir,
                       const std::vector<std::string>& stems);

// Runs a command line, captures combined stdout+stderr, returns the exit
// code (-1 when the child did not exit normally).
int run_command(const std::string& command, std::string* output);

std::string read_file(const std::string& path);

}  // namespace testhelp
