// Pipeline configuration: typed fields, a flat TOML reader/writer, and a
// content hash that stamps every segmentation with its exact settings.
#pragma once

#include <string>
#include <vector>

#include "cluster.hpp"
#include "features.hpp"
#include "fusion.hpp"
#include "nolrr.hpp"

namespace afa {

enum class GraphMode { kFused, kAdjacency, kNolrrOnly };
enum class NodesMode { kApcSpr, kKmeansSpr, kKmeans, kArea };

struct PipelineConfig {
  // Superpixel stack: comma list of "fh:<k>[:<min_size>[:<sigma>]]" or
  // "map:<path>" entries.  fh_min_size / fh_sigma supply the defaults.
  std::string scales = "fh:50,fh:100,fh:150,fh:200,fh:300";
  int fh_min_size = 20;
  double fh_sigma = 0.8;

  DenoiseMode denoise = DenoiseMode::kIkde;
  DenoiseTarget denoise_target = DenoiseTarget::kFeature;
  double alpha = 1.0;

  int psi = 3;
  double tau = 1e-6;

  double e = 3.0;
  double g = 5.0;
  double damping = 0.9;
  int apc_max_iter = 1000;
  int apc_conv_window = 50;
  NodesMode nodes_mode = NodesMode::kApcSpr;
  NodeRule node_rule = NodeRule::kSizeWindow;

  int d = 50;
  double lambda1 = 1.0;
  MUpdate m_update = MUpdate::kAlgo2;

  GraphMode graph_mode = GraphMode::kFused;
  AffinityKernel affinity = AffinityKernel::kLinear;
  double beta = 1e-3;

  int kt = 2;
  int kt_min = 1;
  int kt_max = 40;

  uint64_t seed = 0;
  bool voi_bits = false;  // natural log by default
  std::string debug_dir;

  // Throws ConfigError when any field is out of range.
  void validate() const;
  // Canonical serialisation: sorted "key = value" lines, stable float
  // formatting.  parse_toml(to_toml()) round-trips exactly.
  std::string to_toml() const;
  // Hex SHA-256 of the canonical serialisation.
  std::string hash() const;

  std::vector<ScaleSpec> scale_specs() const;

  static PipelineConfig parse_toml(const std::string& text);
  static PipelineConfig load_toml_file(const std::string& path);
  // Applies one "key" = textual value override.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
};

std::string sha256_hex(const std::string& data);

}  // namespace afa
