#ifndef SNNTOPO_H
#define SNNTOPO_H

/* C interface to the sparse-network topology library. All functions return
 * SNN_OK or an error code; the failure message for the current thread is
 * available through snn_last_error(). Strings returned through char** out
 * parameters are heap-allocated and must be released with snn_string_free().
 * Handles are opaque; each *_free accepts NULL. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SNN_API __declspec(dllexport)
#else
#define SNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum snn_status {
  SNN_OK = 0,
  SNN_E_INVALID = 1,     /* bad argument or domain violation */
  SNN_E_PARSE = 2,       /* malformed JSON / CSV / container */
  SNN_E_IO = 3,          /* file not readable or writable */
  SNN_E_SHAPE = 4,       /* tensor or partition shapes disagree */
  SNN_E_STATE = 5,       /* operation invalid for the handle's state */
  SNN_E_NUMERIC = 6,     /* iteration failed to converge or overflowed */
  SNN_E_UNSUPPORTED = 7, /* recognized but not implemented for this input */
  SNN_E_INTERNAL = 8,    /* unexpected failure; see snn_last_error() */
} snn_status;

typedef struct snn_arch snn_arch;
typedef struct snn_mask snn_mask;
typedef struct snn_graph snn_graph;

SNN_API const char* snn_version(void);

/* Message of the last failing call on this thread. Owned by the library;
 * valid until the next failing call on the same thread. */
SNN_API const char* snn_last_error(void);

SNN_API void snn_string_free(char* s);

/* ---- architectures ---- */

/* Builtin names: conv6, resnet20, resnet32, wide-resnet-28-2. */
SNN_API snn_status snn_arch_builtin(const char* name, uint32_t input_h, uint32_t input_w,
                                    uint32_t num_classes, snn_arch** out);
SNN_API snn_status snn_arch_from_json(const char* json_text, snn_arch** out);
SNN_API snn_status snn_arch_load(const char* path, snn_arch** out);
SNN_API snn_status snn_arch_json(const snn_arch* a, char** out);
/* Shapes, parameter counts, totals. */
SNN_API snn_status snn_arch_info_json(const snn_arch* a, char** out);
SNN_API snn_status snn_builtin_names_json(char** out);
SNN_API void snn_arch_free(snn_arch* a);

/* ---- sparsity masks ---- */

/* method: uniform | er | erk. Generates a binary mask. */
SNN_API snn_status snn_mask_generate(const snn_arch* a, const char* method, double sparsity,
                                     uint64_t seed, snn_mask** out);
/* init: gaussian-fan-in | unit-magnitude. Fails if weights are present. */
SNN_API snn_status snn_mask_attach_weights(snn_mask* m, const snn_arch* a, const char* init,
                                           uint64_t seed);
SNN_API snn_status snn_mask_save(const snn_mask* m, const char* path);
/* arch is optional; when given the mask is validated against it. */
SNN_API snn_status snn_mask_load(const char* path, const snn_arch* a, snn_mask** out);
SNN_API snn_status snn_mask_density_json(const snn_mask* m, const snn_arch* a, char** out);
SNN_API void snn_mask_free(snn_mask* m);

/* ---- graph encodings ---- */

/* Whole-network unrolled encoding: N weighted layers, N+1 partitions. */
SNN_API snn_status snn_encode_network(const snn_arch* a, const snn_mask* m, int weighted,
                                      snn_graph** out);
/* Single weighted layer (position in mask-layout order) under any encoding:
 * unrolled | rolled | rolled-channel. */
SNN_API snn_status snn_encode_layer(const snn_arch* a, const snn_mask* m, const char* encoding,
                                    size_t weighted_pos, int weighted, snn_graph** out);
/* format: edgelist | csr. Load sniffs the format. */
SNN_API snn_status snn_graph_save(const snn_graph* g, const char* path, const char* format);
SNN_API snn_status snn_graph_load(const char* path, snn_graph** out);
SNN_API snn_status snn_graph_info_json(const snn_graph* g, char** out);
SNN_API void snn_graph_free(snn_graph* g);

/* ---- topometrics ---- */

/* groups_csv: comma-separated subset of local,neighbor,strength,global,
 * expansion, or NULL/"" for all. */
SNN_API snn_status snn_topometrics_json(const snn_graph* g, const char* groups_csv,
                                        int exclude_padding, uint64_t seed, uint32_t workers,
                                        char** out);
SNN_API snn_status snn_topometrics_csv(const snn_graph* g, const char* label,
                                       const char* groups_csv, int exclude_padding, uint64_t seed,
                                       uint32_t workers, char** out);

/* ---- expander metrics ---- */

SNN_API snn_status snn_ramanujan_json(const snn_arch* a, const snn_mask* m, const char* encoding,
                                      uint64_t seed, uint32_t workers, char** out);
/* Per-layer density vs expander-gap correlation table. Either output may be
 * NULL when only one form is wanted. */
SNN_API snn_status snn_density_study(const snn_arch* a, const snn_mask* m, const char* encoding,
                                     uint64_t seed, uint32_t workers, char** out_csv,
                                     char** out_json);

/* ---- accuracy-drop regression ---- */

/* accuracy_csv_text: architecture,dataset,algorithm,sparsity,run,acc,
 * acc_dense[,acc_std]. features_csv_text: architecture,algorithm,sparsity
 * followed by feature columns. scenario: "sparsity:0.9" | "architecture:conv6".
 * out_importance_csv may be NULL. */
SNN_API snn_status snn_regression_run(const char* accuracy_csv_text,
                                      const char* features_csv_text, const char* scenario,
                                      uint32_t k_folds, uint32_t runs, uint64_t seed,
                                      uint32_t workers, int include_bayesian, char** out_json,
                                      char** out_importance_csv);

/* ---- ranking ---- */

/* request: {"algorithms":[{"name":...,"topometrics":[...]},...],
 *           "importance_model":[...], "importance_sparsity":[...],
 *           "normalize":true}. Response carries the ascending ranking. */
SNN_API snn_status snn_rank_json(const char* request_json, char** out);
/* strategies_json: [{"name":...,"cells":[{"architecture":...,"sparsity":...,
 * "ranking":[...]},...]},...]. Either output may be NULL. */
SNN_API snn_status snn_rank_eval(const char* accuracy_csv_text, const char* strategies_json,
                                 char** out_csv, char** out_json);

/* ---- bundled reference data ---- */

SNN_API snn_status snn_fixture_accuracy_csv(char** out);
SNN_API snn_status snn_fixture_architecture_json(const char* name, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SNNTOPO_H */
