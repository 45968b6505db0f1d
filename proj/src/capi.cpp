#include "afa/afa.h"

#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "imgio.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
afa_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return AFA_OK;
  } catch (const afa::ConfigError& e) {
    g_last_error = e.what();
    return AFA_ERR_CONFIG;
  } catch (const afa::DataError& e) {
    g_last_error = e.what();
    return AFA_ERR_DATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AFA_ERR_INTERNAL;
  }
}

afa_status arg_error(const char* msg) {
  g_last_error = msg;
  return AFA_ERR_CONFIG;
}

afa_status fill_buffer(const std::string& value, char* buf, size_t buf_size) {
  if (buf == nullptr) return arg_error("null output buffer");
  if (buf_size < value.size() + 1) {
    g_last_error = "buffer too small, need " +
                   std::to_string(value.size() + 1) + " bytes";
    return AFA_ERR_CONFIG;
  }
  std::memcpy(buf, value.data(), value.size() + 1);
  g_last_error.clear();
  return AFA_OK;
}

afa::Image* unwrap(afa_image* p) { return reinterpret_cast<afa::Image*>(p); }
const afa::Image* unwrap(const afa_image* p) {
  return reinterpret_cast<const afa::Image*>(p);
}
afa::LabelMap* unwrap(afa_labelmap* p) {
  return reinterpret_cast<afa::LabelMap*>(p);
}
const afa::LabelMap* unwrap(const afa_labelmap* p) {
  return reinterpret_cast<const afa::LabelMap*>(p);
}
afa::PipelineConfig* unwrap(afa_config* p) {
  return reinterpret_cast<afa::PipelineConfig*>(p);
}
const afa::PipelineConfig* unwrap(const afa_config* p) {
  return reinterpret_cast<const afa::PipelineConfig*>(p);
}
afa::Pipeline* unwrap(afa_pipeline* p) {
  return reinterpret_cast<afa::Pipeline*>(p);
}
const afa::Pipeline* unwrap(const afa_pipeline* p) {
  return reinterpret_cast<const afa::Pipeline*>(p);
}

}  // namespace

extern "C" {

const char* afa_version(void) { return "0.1.0"; }

const char* afa_last_error(void) { return g_last_error.c_str(); }

afa_status afa_image_load(const char* path, afa_image** out) {
  if (path == nullptr || out == nullptr)
    return arg_error("afa_image_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_image*>(new afa::Image(afa::load_image(path)));
  });
}

afa_status afa_image_size(const afa_image* img, int32_t* width,
                          int32_t* height) {
  if (img == nullptr) return arg_error("afa_image_size: null image");
  if (width) *width = unwrap(img)->width;
  if (height) *height = unwrap(img)->height;
  g_last_error.clear();
  return AFA_OK;
}

void afa_image_free(afa_image* img) { delete unwrap(img); }

afa_status afa_labelmap_read(const char* path, int32_t expect_width,
                             int32_t expect_height, afa_labelmap** out) {
  if (path == nullptr || out == nullptr)
    return arg_error("afa_labelmap_read: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_labelmap*>(new afa::LabelMap(
        afa::read_label_map(path, expect_width, expect_height)));
  });
}

afa_status afa_labelmap_create(int32_t width, int32_t height,
                               const int32_t* labels, afa_labelmap** out) {
  if (labels == nullptr || out == nullptr)
    return arg_error("afa_labelmap_create: null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<int32_t> values(labels,
                                labels + size_t(width) * size_t(height));
    *out = reinterpret_cast<afa_labelmap*>(
        new afa::LabelMap(afa::make_label_map(width, height, std::move(values))));
  });
}

afa_status afa_labelmap_size(const afa_labelmap* map, int32_t* width,
                             int32_t* height, int32_t* num_labels) {
  if (map == nullptr) return arg_error("afa_labelmap_size: null map");
  if (width) *width = unwrap(map)->width;
  if (height) *height = unwrap(map)->height;
  if (num_labels) *num_labels = unwrap(map)->num_labels;
  g_last_error.clear();
  return AFA_OK;
}

afa_status afa_labelmap_data(const afa_labelmap* map, const int32_t** labels) {
  if (map == nullptr || labels == nullptr)
    return arg_error("afa_labelmap_data: null argument");
  *labels = unwrap(map)->labels.data();
  g_last_error.clear();
  return AFA_OK;
}

afa_status afa_labelmap_write_pgm(const afa_labelmap* map, const char* path) {
  if (map == nullptr || path == nullptr)
    return arg_error("afa_labelmap_write_pgm: null argument");
  return guarded([&] { afa::write_label_map_pgm(*unwrap(map), path); });
}

afa_status afa_labelmap_write_overlay(const afa_labelmap* map,
                                      const afa_image* img, const char* path) {
  if (map == nullptr || img == nullptr || path == nullptr)
    return arg_error("afa_labelmap_write_overlay: null argument");
  return guarded(
      [&] { afa::write_overlay_png(*unwrap(img), *unwrap(map), path); });
}

void afa_labelmap_free(afa_labelmap* map) { delete unwrap(map); }

afa_status afa_config_create(afa_config** out) {
  if (out == nullptr) return arg_error("afa_config_create: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_config*>(new afa::PipelineConfig());
  });
}

afa_status afa_config_load(const char* toml_path, afa_config** out) {
  if (toml_path == nullptr || out == nullptr)
    return arg_error("afa_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_config*>(
        new afa::PipelineConfig(afa::PipelineConfig::load_toml_file(toml_path)));
  });
}

afa_status afa_config_set(afa_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr)
    return arg_error("afa_config_set: null argument");
  // Validate on a copy so a rejected value leaves the config untouched.
  return guarded([&] {
    afa::PipelineConfig next = *unwrap(cfg);
    next.set(key, value);
    next.validate();
    *unwrap(cfg) = std::move(next);
  });
}

afa_status afa_config_get(const afa_config* cfg, const char* key, char* buf,
                          size_t buf_size) {
  if (cfg == nullptr || key == nullptr)
    return arg_error("afa_config_get: null argument");
  std::string value;
  afa_status st = guarded([&] { value = unwrap(cfg)->get(key); });
  if (st != AFA_OK) return st;
  return fill_buffer(value, buf, buf_size);
}

afa_status afa_config_toml(const afa_config* cfg, char* buf, size_t buf_size) {
  if (cfg == nullptr) return arg_error("afa_config_toml: null argument");
  std::string value;
  afa_status st = guarded([&] { value = unwrap(cfg)->to_toml(); });
  if (st != AFA_OK) return st;
  return fill_buffer(value, buf, buf_size);
}

afa_status afa_config_hash(const afa_config* cfg, char* buf, size_t buf_size) {
  if (cfg == nullptr) return arg_error("afa_config_hash: null argument");
  std::string value;
  afa_status st = guarded([&] { value = unwrap(cfg)->hash(); });
  if (st != AFA_OK) return st;
  return fill_buffer(value, buf, buf_size);
}

void afa_config_free(afa_config* cfg) { delete unwrap(cfg); }

afa_status afa_pipeline_create(const afa_image* img, const afa_config* cfg,
                               afa_pipeline** out) {
  if (img == nullptr || cfg == nullptr || out == nullptr)
    return arg_error("afa_pipeline_create: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_pipeline*>(
        new afa::Pipeline(*unwrap(img), *unwrap(cfg)));
  });
}

afa_status afa_pipeline_prepare(afa_pipeline* p, int32_t k_max) {
  if (p == nullptr) return arg_error("afa_pipeline_prepare: null pipeline");
  return guarded([&] { unwrap(p)->prepare_partition(k_max); });
}

afa_status afa_pipeline_segment(afa_pipeline* p, int32_t k_t,
                                afa_labelmap** out) {
  if (p == nullptr || out == nullptr)
    return arg_error("afa_pipeline_segment: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = reinterpret_cast<afa_labelmap*>(
        new afa::LabelMap(unwrap(p)->segment(k_t)));
  });
}

afa_status afa_pipeline_record(const afa_pipeline* p, afa_run_record* out) {
  if (p == nullptr || out == nullptr)
    return arg_error("afa_pipeline_record: null argument");
  const afa::RunRecord& r = unwrap(p)->record();
  out->time_superpixels = r.times.superpixels;
  out->time_features = r.times.features;
  out->time_nodes = r.times.nodes;
  out->time_lowrank = r.times.lowrank;
  out->time_graphs = r.times.graphs;
  out->time_partition = r.times.partition;
  out->chosen_kt = r.chosen_kt;
  g_last_error.clear();
  return AFA_OK;
}

afa_status afa_pipeline_num_scales(const afa_pipeline* p, int32_t* out) {
  if (p == nullptr || out == nullptr)
    return arg_error("afa_pipeline_num_scales: null argument");
  *out = int32_t(unwrap(p)->stack().scales.size());
  g_last_error.clear();
  return AFA_OK;
}

afa_status afa_pipeline_scale_info(const afa_pipeline* p, int32_t scale,
                                   int32_t* superpixels, int32_t* clusters,
                                   int32_t* global_nodes) {
  if (p == nullptr) return arg_error("afa_pipeline_scale_info: null pipeline");
  const afa::RunRecord& r = unwrap(p)->record();
  if (scale < 0 || size_t(scale) >= r.scale_superpixels.size())
    return arg_error("afa_pipeline_scale_info: scale index out of range");
  if (superpixels) *superpixels = r.scale_superpixels[scale];
  if (clusters) *clusters = r.scale_clusters[scale];
  if (global_nodes) *global_nodes = r.scale_nodes[scale];
  g_last_error.clear();
  return AFA_OK;
}

void afa_pipeline_free(afa_pipeline* p) { delete unwrap(p); }

afa_status afa_evaluate(const afa_labelmap* seg,
                        const afa_labelmap* const* truths, size_t num_truths,
                        int voi_bits, afa_metric_report* out) {
  if (seg == nullptr || truths == nullptr || out == nullptr)
    return arg_error("afa_evaluate: null argument");
  if (num_truths == 0) return arg_error("afa_evaluate: no ground truths");
  return guarded([&] {
    std::vector<afa::LabelMap> gt;
    gt.reserve(num_truths);
    for (size_t i = 0; i < num_truths; ++i) {
      if (truths[i] == nullptr)
        throw afa::ConfigError("afa_evaluate: null ground truth entry");
      gt.push_back(*unwrap(truths[i]));
    }
    afa::MetricReport r = afa::evaluate(*unwrap(seg), gt, voi_bits != 0);
    out->pri = r.pri;
    out->voi = r.voi;
    out->gce = r.gce;
    out->bde = r.bde;
  });
}

}  // extern "C"
