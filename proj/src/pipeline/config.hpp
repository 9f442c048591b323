#pragma once

#include "core/canny.hpp"
#include "dataset/patch.hpp"
#include "enhancer/network.hpp"
#include "losses/losses.hpp"
#include "synthdce/curve_network.hpp"
#include "synthdce/synth_losses.hpp"
#include "textcp/textcp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace darktext::pipeline {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct TrainSettings {
    int epochs = 1;
    int batch_size = 1;
    double lr = 1e-4;
    double lr_decayed = 1e-5;
    int decay_epoch = 0;            // 0 keeps lr constant
    int checkpoint_every = 50;      // epochs
    data::PatchSpec patch;
    fs::path resume;                // checkpoint to continue from
};

struct DataSettings {
    fs::path manifest;
    std::string train_split = "train";
    std::string test_split = "test";
    bool allow_unlabeled = false;
};

struct EnhanceSettings {
    fs::path checkpoint;
    fs::path input_dir;
    enhancer::EdgeSource edge_source = enhancer::EdgeSource::Classical;
    fs::path edge_dir;              // per-image maps named like the input, file source only
    bool tile = false;
    int tile_size = 512;
    int tile_overlap = 64;
    bool write_edges = false;
    bool panels = false;
};

struct SynthesizeSettings {
    fs::path checkpoint;
    fs::path input_dir;
    bool clamp = true;
};

struct AugmentSettings {
    int copies = 1;
};

struct EvaluateSettings {
    fs::path enhanced_dir;
    fs::path reference_dir;
    fs::path annotation_dir;        // ground-truth ICDAR files
    fs::path detection_dir;         // optional detector output, ICDAR format
    fs::path recognition_dir;       // optional recogniser output, ICDAR format with text
};

struct EnhancerLossSettings {
    losses::LossWeights weights;
    double smooth_l1_delta = 1.0;
    losses::EdgeLossParams edge;
    double text_gain = 1.0;
    losses::MsSsimConfig ms_ssim;
    CannyParams canny;              // ground-truth edges of the long exposure
};

struct SynthLossSettings {
    synth::SynthLossWeights weights;
    synth::SpaConfig spa;
};

struct RunConfig {
    std::string profile = "desk";
    std::uint64_t seed = 0;
    fs::path output_dir = "out";
    DataSettings data;
    enhancer::EnhancerConfig enhancer;
    synth::CurveNetworkConfig synth;
    EnhancerLossSettings enhancer_loss;
    SynthLossSettings synth_loss;
    TrainSettings train_enhance;
    TrainSettings train_synth;
    bool textcp_enabled = false;
    textcp::TextCpParams textcp;
    EnhanceSettings enhance;
    SynthesizeSettings synthesize;
    AugmentSettings augment;
    EvaluateSettings evaluate;
};

// Defaults for a named profile: "desk" (small CPU-sized networks and
// patches) or "full" (full-size recipe).
RunConfig profile_defaults(const std::string& profile);

// Reads "profile" first, then overlays every other key on that profile's
// defaults. Unknown keys are config errors. Relative paths resolve against
// `base_dir`.
RunConfig config_from_json(const json& doc, const fs::path& base_dir = {});
json config_to_json(const RunConfig& cfg);

json load_config_document(const fs::path& path);

// Environment overrides: DARKTEXT_TRAIN_ENHANCE__EPOCHS=10 sets
// /train_enhance/epochs. Sections are separated by "__" and names are
// lower-cased. Values parse as JSON when possible, otherwise as strings.
inline constexpr const char* kEnvPrefix = "DARKTEXT_";
void apply_env_overrides(json& doc, char** environ_block);

// Sets a dotted key ("train_enhance.epochs") to a JSON-or-string value.
void set_config_value(json& doc, const std::string& dotted_key, const std::string& value);

} // namespace darktext::pipeline
