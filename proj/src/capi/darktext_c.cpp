#include "darktext/darktext.h"

#include "core/color.hpp"
#include "core/edges.hpp"
#include "core/error.hpp"
#include "metrics/image_metrics.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/inference.hpp"
#include "pipeline/training.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>

extern char** environ;

struct dt_config {
    darktext::pipeline::json doc;
    std::filesystem::path base_dir;
};

struct dt_enhancer {
    std::unique_ptr<darktext::enhancer::EnhancerNetwork> net;
};

struct dt_synthesizer {
    std::unique_ptr<darktext::synth::CurveNetwork> net;
};

namespace {

using namespace darktext;

thread_local std::string g_last_error;

dt_status status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config: return DT_ERR_CONFIG;
    case ErrorCode::InvalidArgument: return DT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Numeric: return DT_ERR_NUMERIC;
    default: return DT_ERR_DATA;
    }
}

template <class F>
dt_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return DT_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return DT_ERR_DATA;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DT_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DT_ERR_INTERNAL;
    }
}

void require_arg(bool ok, const char* what) {
    require(ok, ErrorCode::InvalidArgument, what);
}

ImageTensor image_from(const double* data, int height, int width, int channels) {
    require_arg(data != nullptr && height > 0 && width > 0, "image buffer must be non-null with positive size");
    const std::size_t n = static_cast<std::size_t>(height) * width * channels;
    return ImageTensor(height, width, channels, std::vector<double>(data, data + n));
}

pipeline::RunConfig resolve(const dt_config* config) {
    return pipeline::config_from_json(config->doc, config->base_dir);
}

} // namespace

extern "C" {

const char* dt_version(void) { return "0.1.0"; }

const char* dt_last_error(void) { return g_last_error.c_str(); }

int dt_exit_code(dt_status status) {
    switch (status) {
    case DT_OK: return 0;
    case DT_ERR_CONFIG:
    case DT_ERR_INVALID_ARGUMENT: return 2;
    case DT_ERR_DATA: return 3;
    case DT_ERR_NUMERIC: return 4;
    default: return 1;
    }
}

dt_status dt_config_new(const char* profile, dt_config** out) {
    return guarded([&] {
        require_arg(out != nullptr, "output handle pointer is null");
        auto cfg = std::make_unique<dt_config>();
        cfg->doc = {{"profile", profile ? profile : "desk"}};
        resolve(cfg.get());
        *out = cfg.release();
    });
}

dt_status dt_config_load(const char* path, dt_config** out) {
    return guarded([&] {
        require_arg(path != nullptr && out != nullptr, "config path and output handle must be non-null");
        auto cfg = std::make_unique<dt_config>();
        cfg->doc = pipeline::load_config_document(path);
        cfg->base_dir = std::filesystem::absolute(path).parent_path();
        resolve(cfg.get());
        *out = cfg.release();
    });
}

dt_status dt_config_set(dt_config* config, const char* key, const char* value) {
    return guarded([&] {
        require_arg(config != nullptr && key != nullptr && value != nullptr, "config, key and value must be non-null");
        pipeline::json trial = config->doc;
        pipeline::set_config_value(trial, key, value);
        pipeline::config_from_json(trial, config->base_dir);
        config->doc = std::move(trial);
    });
}

dt_status dt_config_apply_env(dt_config* config) {
    return guarded([&] {
        require_arg(config != nullptr, "config is null");
        pipeline::json trial = config->doc;
        pipeline::apply_env_overrides(trial, environ);
        pipeline::config_from_json(trial, config->base_dir);
        config->doc = std::move(trial);
    });
}

dt_status dt_config_to_json(const dt_config* config, char* buf, size_t capacity, size_t* needed) {
    return guarded([&] {
        require_arg(config != nullptr, "config is null");
        const std::string text = pipeline::config_to_json(resolve(config)).dump(2);
        if (needed) *needed = text.size() + 1;
        if (!buf) return;
        require_arg(capacity > text.size(), "buffer too small for the configuration");
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

void dt_config_free(dt_config* config) { delete config; }

dt_status dt_run_task(const dt_config* config, const char* task, const char* out_dir, const uint64_t* seed) {
    return guarded([&] {
        require_arg(config != nullptr && task != nullptr, "config and task must be non-null");
        pipeline::RunConfig cfg = resolve(config);
        if (out_dir) cfg.output_dir = out_dir;
        if (seed) cfg.seed = *seed;
        pipeline::run_task(cfg, pipeline::parse_task(task));
    });
}

dt_status dt_enhancer_load(const char* checkpoint_path, dt_enhancer** out) {
    return guarded([&] {
        require_arg(checkpoint_path != nullptr && out != nullptr, "checkpoint path and output handle must be non-null");
        auto h = std::make_unique<dt_enhancer>();
        h->net = pipeline::load_enhancer(pipeline::load_checkpoint(checkpoint_path));
        *out = h.release();
    });
}

dt_status dt_enhancer_run(const dt_enhancer* enhancer, const double* rgb, int height, int width, const double* edges,
                          double* out_rgb, double* out_edge) {
    return guarded([&] {
        require_arg(enhancer != nullptr && out_rgb != nullptr, "enhancer and output buffer must be non-null");
        const ImageTensor x = image_from(rgb, height, width, 3);
        const EdgeMap e = edges ? map_from_image<EdgeMap>(image_from(edges, height, width, 1)) : sobel_edges(x);
        const auto r = pipeline::enhance_image(*enhancer->net, x, e);
        std::copy(r.enhanced.values().begin(), r.enhanced.values().end(), out_rgb);
        if (out_edge) std::copy(r.fused_edge.values().begin(), r.fused_edge.values().end(), out_edge);
    });
}

void dt_enhancer_free(dt_enhancer* enhancer) { delete enhancer; }

dt_status dt_synthesizer_load(const char* checkpoint_path, dt_synthesizer** out) {
    return guarded([&] {
        require_arg(checkpoint_path != nullptr && out != nullptr, "checkpoint path and output handle must be non-null");
        auto h = std::make_unique<dt_synthesizer>();
        h->net = pipeline::load_synth(pipeline::load_checkpoint(checkpoint_path));
        *out = h.release();
    });
}

dt_status dt_synthesizer_run(const dt_synthesizer* synthesizer, const double* rgb, int height, int width, int clamp,
                             double* out_rgb) {
    return guarded([&] {
        require_arg(synthesizer != nullptr && out_rgb != nullptr, "synthesizer and output buffer must be non-null");
        const ImageTensor y = image_from(rgb, height, width, 3);
        const ImageTensor x = pipeline::synthesize_image(*synthesizer->net, y, clamp != 0);
        std::copy(x.values().begin(), x.values().end(), out_rgb);
    });
}

void dt_synthesizer_free(dt_synthesizer* synthesizer) { delete synthesizer; }

dt_status dt_psnr(const double* a, const double* b, int height, int width, int channels, double* db, int* infinite) {
    return guarded([&] {
        require_arg(db != nullptr, "result pointer is null");
        const auto p = metrics::psnr(image_from(a, height, width, channels), image_from(b, height, width, channels));
        *db = p.db;
        if (infinite) *infinite = p.infinite ? 1 : 0;
    });
}

dt_status dt_ssim(const double* a, const double* b, int height, int width, int channels, double* value) {
    return guarded([&] {
        require_arg(value != nullptr, "result pointer is null");
        *value = metrics::ssim(image_from(a, height, width, channels), image_from(b, height, width, channels));
    });
}

dt_status dt_mean_lightness(const double* rgb, int height, int width, double* value) {
    return guarded([&] {
        require_arg(value != nullptr, "result pointer is null");
        *value = mean_lightness(image_from(rgb, height, width, 3));
    });
}

} // extern "C"
