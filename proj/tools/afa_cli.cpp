// Command-line front end: segment single images, benchmark datasets with a
// group-count sweep, run ablation grids, and score externally produced
// label maps.  Everything goes through the shared-library C interface.
#include <atomic>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "afa/afa.h"

namespace fs = std::filesystem;

namespace {

struct ImageDel {
  void operator()(afa_image* p) const { afa_image_free(p); }
};
struct MapDel {
  void operator()(afa_labelmap* p) const { afa_labelmap_free(p); }
};
struct ConfigDel {
  void operator()(afa_config* p) const { afa_config_free(p); }
};
struct PipelineDel {
  void operator()(afa_pipeline* p) const { afa_pipeline_free(p); }
};
using ImagePtr = std::unique_ptr<afa_image, ImageDel>;
using MapPtr = std::unique_ptr<afa_labelmap, MapDel>;
using ConfigPtr = std::unique_ptr<afa_config, ConfigDel>;
using PipelinePtr = std::unique_ptr<afa_pipeline, PipelineDel>;

// Failures escape worker code as this exception and become the exit code.
struct CliError {
  afa_status status;
  std::string message;
};

void check(afa_status st, const std::string& context) {
  if (st == AFA_OK) return;
  throw CliError{st, context + ": " + afa_last_error()};
}

std::mutex g_io_mutex;

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_io_mutex);
  std::cerr << "warning: " << msg << "\n";
}

// Global config layers shared by all verbs: optional file, then overrides.
struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;

  ConfigPtr build(const std::vector<std::string>& extra = {}) const {
    afa_config* raw = nullptr;
    if (file.empty())
      check(afa_config_create(&raw), "config");
    else
      check(afa_config_load(file.c_str(), &raw), "config " + file);
    ConfigPtr cfg(raw);
    auto apply = [&](const std::string& kv) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw CliError{AFA_ERR_CONFIG, "override '" + kv + "' is not key=value"};
      std::string key = kv.substr(0, eq);
      std::string value = kv.substr(eq + 1);
      check(afa_config_set(cfg.get(), key.c_str(), value.c_str()),
            "override " + kv);
    };
    for (const std::string& kv : sets) apply(kv);
    for (const std::string& kv : extra) apply(kv);
    return cfg;
  }
};

std::string config_str(const afa_config* cfg, const char* key) {
  char buf[4096];
  check(afa_config_get(cfg, key, buf, sizeof(buf)), std::string("get ") + key);
  return buf;
}

int config_int(const afa_config* cfg, const char* key) {
  return std::stoi(config_str(cfg, key));
}

std::string config_hash12(const afa_config* cfg) {
  char buf[80];
  check(afa_config_hash(cfg, buf, sizeof(buf)), "config hash");
  return std::string(buf).substr(0, 12);
}

ImagePtr load_image(const fs::path& path) {
  afa_image* raw = nullptr;
  check(afa_image_load(path.string().c_str(), &raw), "image " + path.string());
  return ImagePtr(raw);
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm";
}

// Annotation files for one image stem, checked in three layouts:
// groundtruth/<stem>/ directory, flat groundtruth/<stem>* files, and
// one level of per-annotator directories groundtruth/<annotator>/<stem>.*.
std::vector<fs::path> find_ground_truth(const fs::path& gt_dir,
                                        const std::string& stem) {
  std::vector<fs::path> out;
  fs::path sub = gt_dir / stem;
  if (fs::is_directory(sub)) {
    for (const auto& entry : fs::directory_iterator(sub))
      if (entry.is_regular_file()) out.push_back(entry.path());
  }
  if (out.empty() && fs::is_directory(gt_dir)) {
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
      if (entry.is_regular_file() &&
          entry.path().filename().string().rfind(stem + ".", 0) == 0)
        out.push_back(entry.path());
      if (entry.is_directory()) {
        for (const auto& inner : fs::directory_iterator(entry.path()))
          if (inner.is_regular_file() &&
              inner.path().stem().string() == stem)
            out.push_back(inner.path());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path resolve_dataset(const std::string& arg) {
  if (!arg.empty() && fs::is_directory(arg)) return arg;
  const char* root = std::getenv("AFA_DATASET_ROOT");
  if (root != nullptr) {
    fs::path joined = arg.empty() ? fs::path(root) : fs::path(root) / arg;
    if (fs::is_directory(joined)) return joined;
  }
  throw CliError{AFA_ERR_DATA, "dataset directory not found: " +
                                   (arg.empty() ? "(AFA_DATASET_ROOT unset)"
                                                : arg)};
}

struct SweepOutcome {
  MapPtr best_map;
  afa_metric_report best{};
  int best_kt = 0;
  afa_run_record record{};
};

// Builds the pipeline once, sweeps the configured group-count range, and
// keeps the best-PRI partition (ties go to the smaller count).
SweepOutcome sweep_image(const afa_image* img, const afa_config* cfg,
                         const std::vector<const afa_labelmap*>& truths,
                         int voi_bits) {
  PipelinePtr pipe;
  {
    afa_pipeline* raw = nullptr;
    check(afa_pipeline_create(img, cfg, &raw), "pipeline");
    pipe.reset(raw);
  }
  const int kt_min = config_int(cfg, "kt_min");
  const int kt_max = config_int(cfg, "kt_max");
  check(afa_pipeline_prepare(pipe.get(), kt_max), "prepare");

  SweepOutcome out;
  out.best.pri = -1.0;
  for (int kt = kt_min; kt <= kt_max; ++kt) {
    afa_labelmap* seg_raw = nullptr;
    check(afa_pipeline_segment(pipe.get(), kt, &seg_raw), "partition");
    MapPtr seg(seg_raw);
    afa_metric_report rep{};
    check(afa_evaluate(seg.get(), truths.data(), truths.size(), voi_bits,
                       &rep),
          "metrics");
    if (rep.pri > out.best.pri) {
      out.best = rep;
      out.best_kt = kt;
      out.best_map = std::move(seg);
    }
  }
  check(afa_pipeline_record(pipe.get(), &out.record), "record");
  return out;
}

struct BenchRow {
  std::string id;
  bool ok = false;
  bool skipped = false;
  std::string note;
  int kt = 0;
  afa_metric_report rep{};
};

// Runs the sweep over every image of a dataset with `workers` threads.
// Row order follows the sorted image list, not completion order.
std::vector<BenchRow> run_benchmark(const fs::path& dataset,
                                    const afa_config* cfg, int workers,
                                    int limit, bool verbose) {
  fs::path img_dir = dataset / "images";
  fs::path gt_dir = dataset / "groundtruth";
  if (!fs::is_directory(img_dir))
    throw CliError{AFA_ERR_DATA,
                   "dataset has no images/ directory: " + dataset.string()};

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(img_dir))
    if (entry.is_regular_file() && is_image_file(entry.path()))
      images.push_back(entry.path());
  std::sort(images.begin(), images.end());
  if (limit > 0 && int(images.size()) > limit) images.resize(limit);

  const int voi_bits = config_str(cfg, "voi_log") == "bits" ? 1 : 0;
  std::vector<BenchRow> rows(images.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> internal_failure{false};
  std::string internal_message;
  std::mutex internal_mutex;

  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < images.size();
         i = next.fetch_add(1)) {
      if (internal_failure.load()) return;
      BenchRow& row = rows[i];
      row.id = images[i].stem().string();
      try {
        std::vector<fs::path> gt_paths = find_ground_truth(gt_dir, row.id);
        if (gt_paths.empty()) {
          row.skipped = true;
          row.note = "no ground truth";
          warn(row.id + ": no ground truth, skipped");
          continue;
        }
        ImagePtr img = load_image(images[i]);
        int32_t w = 0, h = 0;
        check(afa_image_size(img.get(), &w, &h), "image size");
        std::vector<MapPtr> gt;
        std::vector<const afa_labelmap*> raw;
        for (const fs::path& p : gt_paths) {
          afa_labelmap* m = nullptr;
          check(afa_labelmap_read(p.string().c_str(), w, h, &m),
                "ground truth " + p.string());
          gt.emplace_back(m);
          raw.push_back(m);
        }
        SweepOutcome res = sweep_image(img.get(), cfg, raw, voi_bits);
        row.ok = true;
        row.kt = res.best_kt;
        row.rep = res.best;
        if (verbose) {
          std::lock_guard<std::mutex> lock(g_io_mutex);
          std::printf("%s k_T=%d pri=%.4f voi=%.4f gce=%.4f bde=%.4f (%.1fs)\n",
                      row.id.c_str(), row.kt, row.rep.pri, row.rep.voi,
                      row.rep.gce, row.rep.bde,
                      res.record.time_superpixels + res.record.time_features +
                          res.record.time_nodes + res.record.time_lowrank +
                          res.record.time_graphs + res.record.time_partition);
          std::fflush(stdout);
        }
      } catch (const CliError& e) {
        if (e.status == AFA_ERR_INTERNAL) {
          std::lock_guard<std::mutex> lock(internal_mutex);
          internal_failure.store(true);
          internal_message = e.message;
          return;
        }
        row.skipped = true;
        row.note = e.message;
        warn(row.id + ": " + e.message + ", skipped");
      }
    }
  };

  int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (internal_failure.load())
    throw CliError{AFA_ERR_INTERNAL, internal_message};
  return rows;
}

afa_metric_report mean_report(const std::vector<BenchRow>& rows, int* count) {
  afa_metric_report mean{};
  int n = 0;
  for (const BenchRow& r : rows) {
    if (!r.ok) continue;
    mean.pri += r.rep.pri;
    mean.voi += r.rep.voi;
    mean.gce += r.rep.gce;
    mean.bde += r.rep.bde;
    ++n;
  }
  if (n > 0) {
    mean.pri /= n;
    mean.voi /= n;
    mean.gce /= n;
    mean.bde /= n;
  }
  *count = n;
  return mean;
}

void write_benchmark_csv(const fs::path& path,
                         const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out)
    throw CliError{AFA_ERR_DATA, "cannot write " + path.string()};
  out << "image,k_t,pri,voi,gce,bde\n";
  char line[256];
  for (const BenchRow& r : rows) {
    if (!r.ok) continue;
    std::snprintf(line, sizeof(line), "%s,%d,%.6f,%.6f,%.6f,%.6f\n",
                  r.id.c_str(), r.kt, r.rep.pri, r.rep.voi, r.rep.gce,
                  r.rep.bde);
    out << line;
  }
  int n = 0;
  afa_metric_report mean = mean_report(rows, &n);
  if (n > 0) {
    std::snprintf(line, sizeof(line), "mean,,%.6f,%.6f,%.6f,%.6f\n", mean.pri,
                  mean.voi, mean.gce, mean.bde);
    out << line;
  }
}

int cmd_segment(const std::string& image_path, const ConfigArgs& cargs,
                const std::string& out_dir, bool verbose) {
  ConfigPtr cfg = cargs.build();
  ImagePtr img = load_image(image_path);
  const std::string hash12 = config_hash12(cfg.get());

  afa_pipeline* praw = nullptr;
  check(afa_pipeline_create(img.get(), cfg.get(), &praw), "pipeline");
  PipelinePtr pipe(praw);

  const int kt = config_int(cfg.get(), "kt");
  afa_labelmap* sraw = nullptr;
  check(afa_pipeline_segment(pipe.get(), kt, &sraw), "partition");
  MapPtr seg(sraw);

  fs::create_directories(out_dir);
  std::string stem = fs::path(image_path).stem().string();
  fs::path base = fs::path(out_dir) / (stem + "_seg_" + hash12);
  check(afa_labelmap_write_pgm(seg.get(), (base.string() + ".pgm").c_str()),
        "write pgm");
  check(afa_labelmap_write_overlay(seg.get(), img.get(),
                                   (base.string() + ".png").c_str()),
        "write overlay");

  int32_t labels = 0;
  check(afa_labelmap_size(seg.get(), nullptr, nullptr, &labels), "size");
  std::printf("%s: %d segments at k_T=%d -> %s.pgm\n", stem.c_str(), labels,
              kt, base.string().c_str());
  if (verbose) {
    afa_run_record rec{};
    check(afa_pipeline_record(pipe.get(), &rec), "record");
    int32_t scales = 0;
    check(afa_pipeline_num_scales(pipe.get(), &scales), "scales");
    for (int32_t s = 0; s < scales; ++s) {
      int32_t sp = 0, cl = 0, gn = 0;
      check(afa_pipeline_scale_info(pipe.get(), s, &sp, &cl, &gn), "scale");
      std::printf("scale %d: %d superpixels, %d clusters, %d global nodes\n",
                  s, sp, cl, gn);
    }
    std::printf(
        "times: superpixels %.2fs, features %.2fs, nodes %.2fs, lowrank "
        "%.2fs, graphs %.2fs, partition %.2fs\n",
        rec.time_superpixels, rec.time_features, rec.time_nodes,
        rec.time_lowrank, rec.time_graphs, rec.time_partition);
    std::printf("config %s\n", hash12.c_str());
  }
  return 0;
}

int cmd_benchmark(const std::string& dataset_arg, const ConfigArgs& cargs,
                  const std::string& out_dir, int workers, int limit,
                  bool verbose) {
  ConfigPtr cfg = cargs.build();
  fs::path dataset = resolve_dataset(dataset_arg);
  std::vector<BenchRow> rows =
      run_benchmark(dataset, cfg.get(), workers, limit, verbose);

  fs::create_directories(out_dir);
  fs::path csv =
      fs::path(out_dir) / ("benchmark_" + config_hash12(cfg.get()) + ".csv");
  write_benchmark_csv(csv, rows);

  int n = 0;
  afa_metric_report mean = mean_report(rows, &n);
  std::printf("%d image(s) -> %s\n", n, csv.string().c_str());
  if (n == 0) {
    warn("no image produced a result");
    return AFA_ERR_DATA;
  }
  std::printf("mean pri=%.4f voi=%.4f gce=%.4f bde=%.4f\n", mean.pri, mean.voi,
              mean.gce, mean.bde);
  return 0;
}

int cmd_ablate(const std::string& dataset_arg, const ConfigArgs& cargs,
               std::vector<std::string> modes, const std::string& out_dir,
               int workers, int limit, bool verbose) {
  if (modes.empty())
    modes = {"graph_mode=adjacency", "graph_mode=nolrr", "graph_mode=fused"};
  fs::path dataset = resolve_dataset(dataset_arg);

  ConfigPtr base = cargs.build();
  fs::create_directories(out_dir);
  fs::path csv =
      fs::path(out_dir) / ("ablate_" + config_hash12(base.get()) + ".csv");
  std::ofstream out(csv);
  if (!out) throw CliError{AFA_ERR_DATA, "cannot write " + csv.string()};
  out << "mode,config,images,pri,voi,gce,bde\n";

  bool any = false;
  for (const std::string& mode : modes) {
    std::vector<std::string> overrides;
    std::stringstream ss(mode);
    std::string part;
    while (std::getline(ss, part, ';'))
      if (!part.empty()) overrides.push_back(part);
    ConfigPtr cfg = cargs.build(overrides);
    std::vector<BenchRow> rows =
        run_benchmark(dataset, cfg.get(), workers, limit, verbose);
    int n = 0;
    afa_metric_report mean = mean_report(rows, &n);
    any = any || n > 0;
    char line[512];
    std::snprintf(line, sizeof(line), "%s,%s,%d,%.6f,%.6f,%.6f,%.6f\n",
                  mode.c_str(), config_hash12(cfg.get()).c_str(), n, mean.pri,
                  mean.voi, mean.gce, mean.bde);
    out << line;
    std::printf("%s: images=%d pri=%.4f voi=%.4f gce=%.4f bde=%.4f\n",
                mode.c_str(), n, mean.pri, mean.voi, mean.gce, mean.bde);
  }
  std::printf("-> %s\n", csv.string().c_str());
  if (!any) {
    warn("no image produced a result");
    return AFA_ERR_DATA;
  }
  return 0;
}

int cmd_metrics(const std::string& seg_path,
                const std::vector<std::string>& truth_args, bool bits) {
  afa_labelmap* sraw = nullptr;
  check(afa_labelmap_read(seg_path.c_str(), -1, -1, &sraw),
        "segmentation " + seg_path);
  MapPtr seg(sraw);
  int32_t w = 0, h = 0;
  check(afa_labelmap_size(seg.get(), &w, &h, nullptr), "size");

  std::vector<fs::path> paths;
  for (const std::string& arg : truth_args) {
    if (fs::is_directory(arg)) {
      std::vector<fs::path> inner;
      for (const auto& entry : fs::directory_iterator(arg))
        if (entry.is_regular_file()) inner.push_back(entry.path());
      std::sort(inner.begin(), inner.end());
      paths.insert(paths.end(), inner.begin(), inner.end());
    } else {
      paths.push_back(arg);
    }
  }
  if (paths.empty())
    throw CliError{AFA_ERR_DATA, "no ground-truth files given"};

  std::vector<MapPtr> gt;
  std::vector<const afa_labelmap*> raw;
  for (const fs::path& p : paths) {
    afa_labelmap* m = nullptr;
    check(afa_labelmap_read(p.string().c_str(), w, h, &m),
          "ground truth " + p.string());
    gt.emplace_back(m);
    raw.push_back(m);
  }
  afa_metric_report rep{};
  check(afa_evaluate(seg.get(), raw.data(), raw.size(), bits ? 1 : 0, &rep),
        "metrics");
  std::printf("pri %.9g\nvoi %.9g\ngce %.9g\nbde %.9g\n", rep.pri, rep.voi,
              rep.gce, rep.bde);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale affinity-graph image segmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", afa_version());

  ConfigArgs cargs;
  std::string out_dir = ".";
  bool verbose = false;
  int workers = 1;
  int limit = 0;

  auto add_config_opts = [&](CLI::App* sub) {
    sub->add_option("-c,--config", cargs.file, "TOML config file");
    sub->add_option("--set", cargs.sets, "config override key=value")
        ->type_name("KEY=VALUE");
  };

  std::string image_path;
  CLI::App* seg = app.add_subcommand("segment", "Segment one image");
  seg->add_option("image", image_path, "PNG or PPM image")->required();
  add_config_opts(seg);
  seg->add_option("-o,--out", out_dir, "output directory");
  seg->add_flag("-v,--verbose", verbose, "print stage details");

  std::string dataset_arg;
  CLI::App* bench = app.add_subcommand(
      "benchmark", "Sweep group counts over a dataset and score the best");
  bench->add_option("dataset", dataset_arg,
                    "dataset directory (images/ + groundtruth/), or a "
                    "subdirectory of $AFA_DATASET_ROOT");
  add_config_opts(bench);
  bench->add_option("-o,--out", out_dir, "output directory");
  bench->add_option("-j,--workers", workers, "parallel image workers");
  bench->add_option("--limit", limit, "use only the first N images");
  bench->add_flag("-v,--verbose", verbose, "per-image progress");

  std::vector<std::string> modes;
  CLI::App* abl =
      app.add_subcommand("ablate", "Benchmark a grid of config variants");
  abl->add_option("dataset", dataset_arg, "dataset directory");
  abl->add_option("-m,--mode", modes,
                  "config overrides for one variant, ';'-separated "
                  "(repeatable; default: the three graph modes)");
  add_config_opts(abl);
  abl->add_option("-o,--out", out_dir, "output directory");
  abl->add_option("-j,--workers", workers, "parallel image workers");
  abl->add_option("--limit", limit, "use only the first N images");
  abl->add_flag("-v,--verbose", verbose, "per-image progress");

  std::string seg_path;
  std::vector<std::string> truth_args;
  bool voi_bits = false;
  CLI::App* met =
      app.add_subcommand("metrics", "Score a label map against ground truth");
  met->add_option("segmentation", seg_path, "label map to score")->required();
  met->add_option("truth", truth_args, "ground-truth files or directories")
      ->required();
  met->add_flag("--bits", voi_bits, "report VoI in bits instead of nats");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seg->parsed())
      return cmd_segment(image_path, cargs, out_dir, verbose);
    if (bench->parsed())
      return cmd_benchmark(dataset_arg, cargs, out_dir, workers, limit,
                           verbose);
    if (abl->parsed())
      return cmd_ablate(dataset_arg, cargs, modes, out_dir, workers, limit,
                        verbose);
    if (met->parsed()) return cmd_metrics(seg_path, truth_args, voi_bits);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return int(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(AFA_ERR_INTERNAL);
  }
  return 0;
}
