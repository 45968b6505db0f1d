// End-to-end segmentation pipeline.
//
// Construction runs every per-image stage once: oversegmentation at all
// configured scales, per-superpixel features with optional smoothing,
// global-node selection, the online low-rank graph, the per-scale affinity
// graphs, their fusion, and the bipartite graph assembly.  segment(k_t)
// then partitions the cached bipartite graph, so sweeping the group count
// re-runs only the cheap final stage.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "fusion.hpp"
#include "imgio.hpp"
#include "metrics.hpp"
#include "superpixel.hpp"

namespace afa {

struct StageTimes {
  double superpixels = 0.0;  // smoothing + oversegmentation, seconds
  double features = 0.0;     // mean-Lab extraction + smoothing
  double nodes = 0.0;        // self-representation, clustering, selection
  double lowrank = 0.0;      // online low-rank representation
  double graphs = 0.0;       // adjacency graphs, fusion, bipartite assembly
  double partition = 0.0;    // cumulative over segment() calls

  double total() const {
    return superpixels + features + nodes + lowrank + graphs + partition;
  }
};

struct RunRecord {
  std::string image_id;
  std::string config_hash;
  StageTimes times;
  int chosen_kt = 0;
  MetricReport metrics{};            // filled by callers with ground truth
  std::vector<int> scale_superpixels;  // superpixel count per scale
  std::vector<int> scale_clusters;     // cluster count per scale
  std::vector<int> scale_nodes;        // global-node count per scale
};

class Pipeline {
 public:
  // Runs all per-image stages.  Throws ConfigError / DataError /
  // InternalError with a stage-tagged message on failure.
  Pipeline(Image image, const PipelineConfig& cfg);

  // Partitions into k_t pixel groups.  Records the partition time and the
  // chosen group count.  The first call (or a prepare_partition call)
  // triggers the eigensolve; later calls at group counts within the
  // prepared bound reuse it.
  LabelMap segment(int k_t);

  // Precomputes eigenpairs for group counts up to k_max, so a sweep shares
  // one eigensolve.
  void prepare_partition(int k_max);

  int width() const { return image_.width; }
  int height() const { return image_.height; }
  const Image& image() const { return image_; }
  const PipelineConfig& config() const { return cfg_; }
  const ScaleStack& stack() const { return stack_; }
  const std::vector<Eigen::MatrixXd>& features() const { return features_; }
  const std::vector<Eigen::MatrixXd>& graphs() const { return graphs_; }
  const std::vector<std::vector<int>>& global_nodes() const { return nodes_; }
  const RunRecord& record() const { return record_; }
  RunRecord& record() { return record_; }

 private:
  PipelineConfig cfg_;
  Image image_;  // original (pre-smoothing) image, used for overlays
  ScaleStack stack_;
  std::vector<Eigen::MatrixXd> features_;
  std::vector<std::vector<int>> nodes_;
  std::vector<Eigen::MatrixXd> graphs_;
  std::unique_ptr<TcutContext> tcut_;
  RunRecord record_;
};

}  // namespace afa
