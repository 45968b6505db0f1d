/* C interface to the multi-scale affinity-graph segmentation core.
 *
 * All functions return afa_status; afa_last_error() carries the message of
 * the most recent failure on the calling thread.  Objects are opaque and
 * owned by the caller through the matching _free function.  Pointers
 * returned by borrow-style getters stay valid until the owning object is
 * freed or mutated.
 */
#ifndef AFA_H
#define AFA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AFA_API __declspec(dllexport)
#else
#define AFA_API __attribute__((visibility("default")))
#endif

typedef enum afa_status {
  AFA_OK = 0,
  AFA_ERR_CONFIG = 1,   /* bad configuration value or argument */
  AFA_ERR_DATA = 2,     /* unreadable or inconsistent input data */
  AFA_ERR_INTERNAL = 3, /* invariant violation inside the core */
} afa_status;

typedef struct afa_image afa_image;
typedef struct afa_labelmap afa_labelmap;
typedef struct afa_config afa_config;
typedef struct afa_pipeline afa_pipeline;

AFA_API const char *afa_version(void);
/* Message of the last failure on this thread; empty string after success. */
AFA_API const char *afa_last_error(void);

/* -------- images (PNG or binary PPM in, stored as Lab) -------- */
AFA_API afa_status afa_image_load(const char *path, afa_image **out);
AFA_API afa_status afa_image_size(const afa_image *img, int32_t *width,
                                  int32_t *height);
AFA_API void afa_image_free(afa_image *img);

/* -------- label maps (16-bit PGM, CSV grid, or .seg in) -------- */
AFA_API afa_status afa_labelmap_read(const char *path, int32_t expect_width,
                                     int32_t expect_height,
                                     afa_labelmap **out);
AFA_API afa_status afa_labelmap_create(int32_t width, int32_t height,
                                       const int32_t *labels,
                                       afa_labelmap **out);
AFA_API afa_status afa_labelmap_size(const afa_labelmap *map, int32_t *width,
                                     int32_t *height, int32_t *num_labels);
/* Borrows the dense row-major label array (width*height entries). */
AFA_API afa_status afa_labelmap_data(const afa_labelmap *map,
                                     const int32_t **labels);
AFA_API afa_status afa_labelmap_write_pgm(const afa_labelmap *map,
                                          const char *path);
/* Region-coloured PNG with red region boundaries. */
AFA_API afa_status afa_labelmap_write_overlay(const afa_labelmap *map,
                                              const afa_image *img,
                                              const char *path);
AFA_API void afa_labelmap_free(afa_labelmap *map);

/* -------- configuration -------- */
AFA_API afa_status afa_config_create(afa_config **out); /* defaults */
AFA_API afa_status afa_config_load(const char *toml_path, afa_config **out);
AFA_API afa_status afa_config_set(afa_config *cfg, const char *key,
                                  const char *value);
AFA_API afa_status afa_config_get(const afa_config *cfg, const char *key,
                                  char *buf, size_t buf_size);
/* Canonical serialisation of the whole config. */
AFA_API afa_status afa_config_toml(const afa_config *cfg, char *buf,
                                   size_t buf_size);
/* Hex SHA-256 of the canonical serialisation (64 chars + NUL). */
AFA_API afa_status afa_config_hash(const afa_config *cfg, char *buf,
                                   size_t buf_size);
AFA_API void afa_config_free(afa_config *cfg);

/* -------- pipeline -------- */
typedef struct afa_run_record {
  double time_superpixels;
  double time_features;
  double time_nodes;
  double time_lowrank;
  double time_graphs;
  double time_partition;
  int32_t chosen_kt;
} afa_run_record;

/* Runs every per-image stage; segment calls afterwards are cheap. */
AFA_API afa_status afa_pipeline_create(const afa_image *img,
                                       const afa_config *cfg,
                                       afa_pipeline **out);
/* Precomputes spectra for group counts up to k_max (sweep optimisation). */
AFA_API afa_status afa_pipeline_prepare(afa_pipeline *p, int32_t k_max);
AFA_API afa_status afa_pipeline_segment(afa_pipeline *p, int32_t k_t,
                                        afa_labelmap **out);
AFA_API afa_status afa_pipeline_record(const afa_pipeline *p,
                                       afa_run_record *out);
AFA_API afa_status afa_pipeline_num_scales(const afa_pipeline *p,
                                           int32_t *out);
AFA_API afa_status afa_pipeline_scale_info(const afa_pipeline *p,
                                           int32_t scale,
                                           int32_t *superpixels,
                                           int32_t *clusters,
                                           int32_t *global_nodes);
AFA_API void afa_pipeline_free(afa_pipeline *p);

/* -------- metrics -------- */
typedef struct afa_metric_report {
  double pri; /* probabilistic Rand index, [0,1] */
  double voi; /* variation of information, nats (or bits) */
  double gce; /* global consistency error, [0,1] */
  double bde; /* boundary displacement error, pixels */
} afa_metric_report;

AFA_API afa_status afa_evaluate(const afa_labelmap *seg,
                                const afa_labelmap *const *truths,
                                size_t num_truths, int voi_bits,
                                afa_metric_report *out);

#ifdef __cplusplus
}
#endif

#endif /* AFA_H */
