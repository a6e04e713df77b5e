/* skelink — skeletal linking analysis of 2D multi-object configurations.
 *
 * C interface over the core library: opaque handles, status codes, and JSON
 * strings for structured data. All returned char* buffers that are not tied
 * to a handle must be released with slk_string_free().
 */
#ifndef SKELINK_H
#define SKELINK_H

#ifdef __cplusplus
extern "C" {
#endif

#ifndef SKELINK_API
#define SKELINK_API __attribute__((visibility("default")))
#endif

typedef enum {
    SLK_OK = 0,
    SLK_ERR_INPUT = 2,      /* malformed input, bad geometry, bad flags */
    SLK_ERR_HYPOTHESIS = 3, /* mathematical hypothesis fails (reducible matrix, ...) */
    SLK_ERR_INTERNAL = 4
} slk_status;

typedef struct slk_analysis slk_analysis;

SKELINK_API const char* slk_version(void);

/* Message for the most recent failing call on this thread. */
SKELINK_API const char* slk_last_error(void);

SKELINK_API void slk_string_free(char* s);

typedef struct {
    int samples_per_boundary; /* boundary resampling density; default 512 */
    double theta_min;         /* skeleton spur-pruning angle (rad); default 0.15 */
    double fan_step;          /* fan direction step (rad); default pi/256 */
    int gl_nodes;             /* Gauss-Legendre nodes per ray segment; default 16 */
    int oracle_resolution;    /* grid cross-check resolution; 0 = skip */
    const char* variant;      /* proximity variant, "c" or "ca" */
} slk_params;

SKELINK_API void slk_params_init(slk_params* params);

/* config_json: {"objects":[{"name":...,"vertices":[[x,y],...]},...],
 *               "bounding":{"kind":"box"|"hull"|"threshold",...}}.
 * bounding_json, when non-NULL, overrides the bounding entry:
 * {"bounding":{...}} or the bare {...} object. */
SKELINK_API slk_status slk_analyze(const char* config_json, const char* bounding_json,
                                   const slk_params* params, slk_analysis** out);

SKELINK_API void slk_analysis_free(slk_analysis* a);

/* Returned pointers are owned by the handle and live until slk_analysis_free. */
SKELINK_API const char* slk_analysis_report_json(slk_analysis* a);
SKELINK_API const char* slk_analysis_report_text(slk_analysis* a);
SKELINK_API const char* slk_analysis_structure_json(slk_analysis* a);

/* Validation report for a configuration document:
 * {"diagnostics":[{"severity":...,"code":...,"message":...},...]}. */
SKELINK_API slk_status slk_validate(const char* config_json, char** diagnostics_json_out);

/* Perron weights of the n x n row-major nonnegative matrix. w_out must hold n
 * entries. v (length n, positive) selects renormalized weights into wv_out.
 * lambda_out, residual_out, wv_out may be NULL. */
SKELINK_API slk_status slk_weights(const double* matrix, int n, const double* v,
                                   double* lambda_out, double* w_out, double* wv_out,
                                   double* residual_out);

/* Tiered-graph components of a report under thresholds. Output:
 * {"edge_threshold":b,"vertex_threshold":a,"components":[[...]],
 *  "vertices":[...],"edges":[{"i":..,"j":..,"c":..},...]}. */
SKELINK_API slk_status slk_graph_components(const char* report_json, double edge_threshold,
                                            double vertex_threshold, char** json_out);

/* Figures from a serialized structure document; kind is one of
 * "overlay", "regions", "levelsets". */
SKELINK_API slk_status slk_render_structure(const char* structure_json, const char* kind,
                                            char** svg_out);

/* Tiered-graph figure from a report document. */
SKELINK_API slk_status slk_render_graph(const char* report_json, char** svg_out);

/* Standalone grid oracle: label raster plus volume table computed by direct
 * nearest-feature queries. raster/legend outputs may be NULL. */
SKELINK_API slk_status slk_oracle(const char* config_json, const char* bounding_json,
                                  int resolution, const slk_params* params,
                                  char** table_json_out, char** raster_pgm_out,
                                  char** legend_json_out);

#ifdef __cplusplus
}
#endif

#endif /* SKELINK_H */
