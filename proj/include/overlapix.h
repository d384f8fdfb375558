/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/*
 * C interface to the overlapix analysis core.
 *
 * All analysis state lives behind the opaque ovx_analysis handle. Results
 * come back as heap-allocated UTF-8 strings (JSON, CSV or SVG documents)
 * owned by the caller; release them with ovx_string_free. Functions return
 * OVX_OK on success; on failure the thread-local message from
 * ovx_last_error() explains what went wrong.
 */
#ifndef OVERLAPIX_H
#define OVERLAPIX_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ovx_status {
  OVX_OK = 0,
  OVX_VALIDATION_ERROR = 1, /* bad input, config or file */
  OVX_INTERNAL_ERROR = 2,   /* broken invariant; a bug */
  OVX_TIME_BUDGET_EXCEEDED = 3
} ovx_status;

/* Opaque analysis state: parsed envelopes, global domains, partition and
 * the binary encoding. Immutable after open; safe to query from several
 * threads concurrently. */
typedef struct ovx_analysis ovx_analysis;

const char* ovx_version(void);

/* Message of the most recent failure on the calling thread ("" if none). */
const char* ovx_last_error(void);

/*
 * options_json may be NULL or a JSON object with any of:
 *   "format":           "auto" | "json" | "csv"        (default "auto")
 *   "partition":        "singleton" | "width=N" | "file=PATH"
 *   "missing":          "error" | "full-range"         (default "error")
 *   "threads":          worker count; results identical for any value
 *   "time_budget_secs": wall-clock budget for exponential operations
 * The OVERLAPIX_TIME_BUDGET_SECS environment variable supplies the budget
 * when the option is absent.
 */
ovx_status ovx_analysis_open_file(const char* path, const char* options_json,
                                  ovx_analysis** out);
ovx_status ovx_analysis_open_text(const char* text, const char* options_json,
                                  ovx_analysis** out);
void ovx_analysis_close(ovx_analysis* analysis);

int ovx_study_count(const ovx_analysis* analysis);

/* Canonical echo of the ingested envelope table (valid tool input). */
ovx_status ovx_inputs_json(ovx_analysis* analysis, char** out);

/* Binary coverage matrix with the partition bins. */
ovx_status ovx_encoded_json(ovx_analysis* analysis, char** out);

/* Pairwise potential matrix, and its heat-map rendering. */
ovx_status ovx_pairwise_json(ovx_analysis* analysis, char** out);
ovx_status ovx_pairwise_csv(ovx_analysis* analysis, char** out);
ovx_status ovx_heatmap_svg(ovx_analysis* analysis, char** out);

/*
 * enum_json may be NULL or a JSON object with any of:
 *   "min_potential":   fraction or decimal string, exclusive threshold
 *   "top_k":           cap on reported combinations
 *   "max_subset_size": cap on combination size
 */
ovx_status ovx_potentials_json(ovx_analysis* analysis, const char* enum_json,
                               char** out);
ovx_status ovx_gridplot_svg(ovx_analysis* analysis, const char* enum_json, char** out);
ovx_status ovx_gridplot_text(ovx_analysis* analysis, const char* enum_json, char** out);

/*
 * criterion: NULL for the default, or one of
 *   "max-pooled-sample-size", "max-study-count",
 *   "max-total-inverse-variance-weight", "composite"
 */
ovx_status ovx_overlap_free_json(ovx_analysis* analysis, const char* criterion,
                                 char** out);

ovx_status ovx_bound_json(ovx_analysis* analysis, char** out);

/* Full self-contained result bundle. */
ovx_status ovx_report_json(ovx_analysis* analysis, const char* enum_json,
                           const char* criterion, char** out);

/* Synthetic ground-truth utilities (no analysis handle involved). */
ovx_status ovx_oracle_generate(const char* config_json, char** out);
ovx_status ovx_oracle_check(const char* fixture_json, char** out);
ovx_status ovx_oracle_check_file(const char* path, char** out);
ovx_status ovx_oracle_sweep(const char* config_json, char** out);

void ovx_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* OVERLAPIX_H */
