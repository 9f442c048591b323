/*
 * darktext C API.
 *
 * Every function returns a dt_status; on failure dt_last_error() describes
 * the problem (thread-local, valid until the next call on the same thread).
 * Images are row-major, channel-last arrays of doubles in [0, 1].
 */
#ifndef DARKTEXT_DARKTEXT_H
#define DARKTEXT_DARKTEXT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(DARKTEXT_BUILDING_LIBRARY)
#define DT_API __attribute__((visibility("default")))
#else
#define DT_API
#endif

typedef enum dt_status {
    DT_OK = 0,
    DT_ERR_INTERNAL = 1,
    DT_ERR_CONFIG = 2,
    DT_ERR_DATA = 3,
    DT_ERR_NUMERIC = 4,
    DT_ERR_INVALID_ARGUMENT = 5
} dt_status;

typedef struct dt_config dt_config;
typedef struct dt_enhancer dt_enhancer;
typedef struct dt_synthesizer dt_synthesizer;

DT_API const char* dt_version(void);
DT_API const char* dt_last_error(void);

/* Process exit status for a failed call: 2 config, 3 data, 4 numeric, 1 other. */
DT_API int dt_exit_code(dt_status status);

/* Configuration. Keys are dotted paths such as "train_enhance.epochs";
 * values are JSON literals or bare strings. */
DT_API dt_status dt_config_new(const char* profile, dt_config** out);
DT_API dt_status dt_config_load(const char* path, dt_config** out);
DT_API dt_status dt_config_set(dt_config* config, const char* key, const char* value);
/* Applies DARKTEXT_* environment variables ("__" separates sections). */
DT_API dt_status dt_config_apply_env(dt_config* config);
/* Writes the resolved configuration as JSON. `needed` receives the size
 * including the terminator; pass buf = NULL to query it. */
DT_API dt_status dt_config_to_json(const dt_config* config, char* buf, size_t capacity, size_t* needed);
DT_API void dt_config_free(dt_config* config);

/* Runs a task: train-enhance, train-synth, enhance, synthesize, augment or
 * evaluate. `out_dir` and `seed` override the configuration when non-NULL. */
DT_API dt_status dt_run_task(const dt_config* config, const char* task, const char* out_dir, const uint64_t* seed);

/* Enhancer inference from a checkpoint. `edges` (height x width) may be NULL,
 * in which case a Sobel map of the input is used; `out_edge` may be NULL. */
DT_API dt_status dt_enhancer_load(const char* checkpoint_path, dt_enhancer** out);
DT_API dt_status dt_enhancer_run(const dt_enhancer* enhancer, const double* rgb, int height, int width,
                                 const double* edges, double* out_rgb, double* out_edge);
DT_API void dt_enhancer_free(dt_enhancer* enhancer);

/* Low-light synthesis from a checkpoint. */
DT_API dt_status dt_synthesizer_load(const char* checkpoint_path, dt_synthesizer** out);
DT_API dt_status dt_synthesizer_run(const dt_synthesizer* synthesizer, const double* rgb, int height, int width,
                                    int clamp, double* out_rgb);
DT_API void dt_synthesizer_free(dt_synthesizer* synthesizer);

/* Image metrics; `channels` is 1 or 3. PSNR of identical images sets
 * *infinite = 1 and *db = +inf. */
DT_API dt_status dt_psnr(const double* a, const double* b, int height, int width, int channels, double* db,
                         int* infinite);
DT_API dt_status dt_ssim(const double* a, const double* b, int height, int width, int channels, double* value);
/* Mean CIELAB L* / 100 of an sRGB image. */
DT_API dt_status dt_mean_lightness(const double* rgb, int height, int width, double* value);

#ifdef __cplusplus
}
#endif

#endif
