#pragma once

#include "core/image.hpp"
#include "enhancer/attention.hpp"
#include "nn/layers.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace darktext::enhancer {

inline constexpr int kSideOutputs = 3;

struct EnhancerConfig {
    int levels = 5;
    int base_channels = 32;          // doubled per level, capped at max_channels
    int max_channels = 512;
    int side_outputs = kSideOutputs;
    // Skip levels (0 = full resolution) that receive edge attention; empty
    // means every skip level.
    std::vector<int> attention_levels;
    // Decoder stages feeding the side edge outputs, indexed by resolution
    // level (levels - 1 = bottleneck). Empty selects the three deepest
    // stages; with fewer stages than outputs the finest one is reused.
    std::vector<int> side_taps;

    int channels_at(int level) const;
    int required_multiple() const { return 1 << (levels - 1); }
    std::vector<int> resolved_attention_levels() const;
    std::vector<int> resolved_side_taps() const;
    void validate() const;
};

// Graph-level outputs, all [N, *, H, W] at the input resolution.
struct EnhancerVars {
    nn::Var enhanced;                        // 3 channels, sigmoid
    nn::Var fused_edge;                      // 1 channel, sigmoid
    std::array<nn::Var, kSideOutputs> side_edges;
};

struct EnhancerOutput {
    ImageTensor enhanced;
    EdgeMap fused_edge;
    std::vector<EdgeMap> side_edges;
};

// Dual-encoder (image + edge), dual-decoder U-Net. Edge attention joins the
// two encoders at the skip connections of the image decoder; the edge
// decoder reads intermediate image-decoder stages.
class EnhancerNetwork {
public:
    EnhancerNetwork(const EnhancerConfig& config, std::uint64_t seed);

    // x: [N, 3, H, W], e: [N, 1, H, W]; H and W divisible by 2^(levels - 1).
    EnhancerVars forward(const nn::Var& x, const nn::Var& e) const;
    EnhancerOutput run(const ImageTensor& x, const EdgeMap& e) const;

    const EnhancerConfig& config() const { return config_; }
    nn::ParameterStore& parameters() { return params_; }
    const nn::ParameterStore& parameters() const { return params_; }

private:
    struct Block {
        nn::Conv2d first;
        nn::Conv2d second;
        nn::Var operator()(const nn::Var& x) const;
    };
    struct Stage {
        nn::Conv2d up;
        Block merge;
    };

    EnhancerConfig config_;
    nn::ParameterStore params_;
    std::vector<Block> image_encoder_;
    std::vector<Block> edge_encoder_;
    std::vector<bool> attended_;
    std::vector<EdgeAttention> attention_;   // indexed by skip level
    std::vector<Stage> decoder_;             // decoder_[l] produces level l
    nn::Conv2d image_head_;
    std::vector<int> taps_;
    std::array<nn::Conv2d, kSideOutputs> side_heads_;
    nn::Conv2d fuse_head_;
};

enum class EdgeSource { Classical, File };

// Edge map fed to the edge encoder: Sobel magnitude normalised to [0, 1], or
// a precomputed map (e.g. from a learned detector run offline) loaded from
// `path` and required to match the image size.
EdgeMap input_edges(const ImageTensor& x, EdgeSource source, const std::filesystem::path& path = {});

} // namespace darktext::enhancer
