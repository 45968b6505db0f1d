#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cluster.hpp"
#include "features.hpp"
#include "nolrr.hpp"
#include "subspace.hpp"

namespace afa {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ClusterAssignment assignment_from(std::vector<int32_t> labels) {
  ClusterAssignment a;
  a.labels = std::move(labels);
  a.num_clusters = relabel_dense(a.labels);
  return a;
}

// Size bucketing: order superpixels by area and keep the middle third.
std::vector<int> area_bucket_nodes(const SuperpixelScale& scale) {
  const int n = scale.count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scale.areas[a] != scale.areas[b] ? scale.areas[a] < scale.areas[b]
                                            : a < b;
  });
  const int lo = n / 3;
  const int hi = (2 * n + 2) / 3;  // ceil(2n/3)
  std::vector<int> nodes(order.begin() + lo, order.begin() + hi);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

void dump_features_csv(const Eigen::MatrixXd& f, const std::string& path) {
  std::ofstream out(path);
  for (int j = 0; j < f.cols(); ++j) {
    for (int r = 0; r < f.rows(); ++r)
      out << (r ? "," : "") << f(r, j);
    out << "\n";
  }
}

}  // namespace

Pipeline::Pipeline(Image image, const PipelineConfig& cfg)
    : cfg_(cfg), image_(std::move(image)) {
  cfg_.validate();
  record_.config_hash = cfg_.hash();
  if (image_.empty()) throw DataError("pipeline: empty image");
  const bool debug = !cfg_.debug_dir.empty();
  if (debug) std::filesystem::create_directories(cfg_.debug_dir);

  // Image-space smoothing feeds every later stage; feature-space smoothing
  // leaves the image untouched.
  auto t0 = Clock::now();
  Image work = cfg_.denoise_target == DenoiseTarget::kImage
                   ? denoise_image(image_, cfg_.denoise, cfg_.alpha)
                   : image_;
  record_.times.features += since(t0);

  t0 = Clock::now();
  stack_ = build_stack(work, cfg_.scale_specs());
  record_.times.superpixels = since(t0);
  const size_t ns = stack_.scales.size();

  t0 = Clock::now();
  features_.reserve(ns);
  for (const SuperpixelScale& scale : stack_.scales) {
    Eigen::MatrixXd f = mlab(work, scale);
    if (cfg_.denoise_target == DenoiseTarget::kFeature)
      f = denoise_features(f, cfg_.denoise, cfg_.alpha);
    features_.push_back(std::move(f));
    record_.scale_superpixels.push_back(scale.count());
  }
  record_.times.features += since(t0);

  // Global nodes per scale.  The adjacency-only graph mode never reads
  // them, so the whole selection stage is skipped there.
  t0 = Clock::now();
  nodes_.resize(ns);
  record_.scale_clusters.assign(ns, 0);
  if (cfg_.graph_mode != GraphMode::kAdjacency) {
    for (size_t s = 0; s < ns; ++s) {
      const Eigen::MatrixXd& f = features_[s];
      const int n = int(f.cols());
      switch (cfg_.nodes_mode) {
        case NodesMode::kArea: {
          nodes_[s] = area_bucket_nodes(stack_.scales[s]);
          record_.scale_clusters[s] = std::min(3, n);
          break;
        }
        case NodesMode::kKmeans: {
          KmeansResult km = kmeans(f.transpose(), std::min(2, n),
                                   derive_seed(cfg_.seed, "nodes-kmeans", s));
          ClusterAssignment assign = assignment_from(std::move(km.labels));
          record_.scale_clusters[s] = assign.num_clusters;
          nodes_[s] = select_global_nodes(assign, cfg_.node_rule);
          break;
        }
        case NodesMode::kKmeansSpr:
        case NodesMode::kApcSpr: {
          ClusterAssignment assign;
          if (n < 2) {
            assign.labels.assign(size_t(n), 0);
            assign.num_clusters = n > 0 ? 1 : 0;
          } else {
            Eigen::MatrixXd c = spr_matrix(f, cfg_.psi, cfg_.tau);
            Eigen::MatrixXd m_sp = symmetrize(c);
            int k = 2;
            if (cfg_.nodes_mode == NodesMode::kApcSpr) {
              PairwiseSimilarity sim = similarity(f, cfg_.e, cfg_.g);
              ApcResult apc =
                  affinity_propagation(sim, cfg_.damping, cfg_.apc_max_iter,
                                       cfg_.apc_conv_window);
              k = apc.num_clusters;
            }
            assign = spectral_cluster(m_sp, k,
                                      derive_seed(cfg_.seed, "spectral", s));
          }
          record_.scale_clusters[s] = assign.num_clusters;
          nodes_[s] = select_global_nodes(assign, cfg_.node_rule);
          break;
        }
      }
    }
  }
  for (size_t s = 0; s < ns; ++s)
    record_.scale_nodes.push_back(int(nodes_[s].size()));
  record_.times.nodes = since(t0);

  // Online low-rank representation over each scale's global nodes.
  t0 = Clock::now();
  std::vector<Eigen::MatrixXd> lowrank(ns);
  if (cfg_.graph_mode != GraphMode::kAdjacency) {
    for (size_t s = 0; s < ns; ++s) {
      NolrrOptions opts;
      opts.d = cfg_.d;
      opts.lambda1 = cfg_.lambda1;
      opts.m_update = cfg_.m_update;
      NolrrState state(int(features_[s].rows()), opts,
                       derive_seed(cfg_.seed, "lowrank", s),
                       int(nodes_[s].size()));
      for (int idx : nodes_[s]) {
        Eigen::VectorXd col = features_[s].col(idx);
        state.step(col, col);
      }
      lowrank[s] = nolrr_graph(state);
    }
  }
  record_.times.lowrank = since(t0);

  t0 = Clock::now();
  graphs_.reserve(ns);
  for (size_t s = 0; s < ns; ++s) {
    const int n = int(features_[s].cols());
    Eigen::MatrixXd base =
        cfg_.graph_mode == GraphMode::kNolrrOnly
            ? Eigen::MatrixXd::Identity(n, n).eval()
            : adjacency_graph(stack_.scales[s], features_[s], cfg_.affinity);
    if (cfg_.graph_mode == GraphMode::kAdjacency)
      graphs_.push_back(std::move(base));
    else
      graphs_.push_back(fuse(base, lowrank[s], nodes_[s]));
  }
  Eigen::SparseMatrix<double> b = bipartite(stack_, graphs_, cfg_.beta);
  tcut_ = std::make_unique<TcutContext>(b);
  record_.times.graphs = since(t0);

  if (debug) {
    namespace fs = std::filesystem;
    for (size_t s = 0; s < ns; ++s) {
      const SuperpixelScale& scale = stack_.scales[s];
      if (scale.count() <= 65536)
        write_label_map_pgm(scale.labels,
                            (fs::path(cfg_.debug_dir) /
                             ("scale_" + std::to_string(s) + ".pgm"))
                                .string());
      dump_features_csv(features_[s],
                        (fs::path(cfg_.debug_dir) /
                         ("features_" + std::to_string(s) + ".csv"))
                            .string());
    }
  }
}

void Pipeline::prepare_partition(int k_max) {
  auto t0 = Clock::now();
  tcut_->prepare(k_max, cfg_.seed);
  record_.times.partition += since(t0);
}

LabelMap Pipeline::segment(int k_t) {
  if (k_t < 1) throw ConfigError("pipeline: k_t must be >= 1");
  auto t0 = Clock::now();
  TcutResult res = tcut_->partition(k_t, cfg_.seed, int(image_.pixels()));
  record_.times.partition += since(t0);
  record_.chosen_kt = k_t;

  LabelMap out;
  out.width = image_.width;
  out.height = image_.height;
  out.num_labels = res.num_labels;
  out.labels = std::move(res.labels);

  if (!cfg_.debug_dir.empty()) {
    std::ofstream dump(std::filesystem::path(cfg_.debug_dir) /
                       ("eigenvalues_k" + std::to_string(k_t) + ".csv"));
    for (int i = 0; i < res.eigenvalues.size(); ++i)
      dump << res.eigenvalues[i] << "\n";
  }
  return out;
}

}  // namespace afa
