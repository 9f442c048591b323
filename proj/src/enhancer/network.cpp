#include "enhancer/network.hpp"

#include "core/edges.hpp"
#include "core/error.hpp"
#include "core/image_io.hpp"
#include "nn/ops.hpp"

#include <algorithm>

namespace darktext::enhancer {

int EnhancerConfig::channels_at(int level) const {
    return std::min(max_channels, base_channels << level);
}

std::vector<int> EnhancerConfig::resolved_attention_levels() const {
    if (!attention_levels.empty()) return attention_levels;
    std::vector<int> all;
    for (int l = 0; l + 1 < levels; ++l) all.push_back(l);
    return all;
}

std::vector<int> EnhancerConfig::resolved_side_taps() const {
    if (!side_taps.empty()) return side_taps;
    std::vector<int> taps;
    for (int j = 0; j < side_outputs; ++j) taps.push_back(std::max(0, levels - 1 - j));
    return taps;
}

void EnhancerConfig::validate() const {
    require(levels >= 2 && levels <= 12, ErrorCode::Config, "enhancer levels must be in [2, 12]");
    require(base_channels >= 1 && max_channels >= base_channels, ErrorCode::Config,
            "enhancer channel widths must be positive with max_channels >= base_channels");
    require(side_outputs == kSideOutputs, ErrorCode::Config,
            "the edge decoder has exactly 3 side outputs, got " + std::to_string(side_outputs));
    for (int l : resolved_attention_levels()) {
        require(l >= 0 && l + 1 < levels, ErrorCode::Config,
                "attention level " + std::to_string(l) + " is not a skip level");
    }
    const auto taps = resolved_side_taps();
    require(static_cast<int>(taps.size()) == side_outputs, ErrorCode::Config,
            "side_taps must list one decoder level per side output");
    for (int t : taps) {
        require(t >= 0 && t < levels, ErrorCode::Config, "side tap level " + std::to_string(t) + " out of range");
    }
}

nn::Var EnhancerNetwork::Block::operator()(const nn::Var& x) const {
    return nn::leaky_relu(second(nn::leaky_relu(first(x))));
}

EnhancerNetwork::EnhancerNetwork(const EnhancerConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    nn::Rng rng(seed);
    const int L = config_.levels;
    auto block = [&](const std::string& name, int in, int out) {
        return Block{nn::Conv2d(params_, name + ".conv1", in, out, 3, rng),
                     nn::Conv2d(params_, name + ".conv2", out, out, 3, rng)};
    };

    for (int l = 0; l < L; ++l) {
        const int in_img = l == 0 ? 3 : config_.channels_at(l - 1);
        const int in_edge = l == 0 ? 1 : config_.channels_at(l - 1);
        image_encoder_.push_back(block("image_encoder." + std::to_string(l), in_img, config_.channels_at(l)));
        edge_encoder_.push_back(block("edge_encoder." + std::to_string(l), in_edge, config_.channels_at(l)));
    }

    attended_.assign(L - 1, false);
    for (int l : config_.resolved_attention_levels()) attended_[l] = true;
    attention_.resize(L - 1);
    for (int l = 0; l + 1 < L; ++l) {
        if (!attended_[l]) continue;
        const int c = config_.channels_at(l);
        attention_[l] = EdgeAttention(params_, "edge_att." + std::to_string(l), c, c, rng);
    }

    decoder_.resize(L - 1);
    for (int l = L - 2; l >= 0; --l) {
        const int c = config_.channels_at(l);
        const std::string name = "decoder." + std::to_string(l);
        decoder_[l].up = nn::Conv2d(params_, name + ".up", config_.channels_at(l + 1), c, 3, rng);
        decoder_[l].merge = block(name, 2 * c, c);
    }
    image_head_ = nn::Conv2d(params_, "image_head", config_.channels_at(0), 3, 1, rng);

    taps_ = config_.resolved_side_taps();
    for (int j = 0; j < kSideOutputs; ++j) {
        const int c = 2 * config_.channels_at(taps_[j]);
        side_heads_[j] = nn::Conv2d(params_, "edge_decoder.side" + std::to_string(j), c, 1, 1, rng);
    }
    fuse_head_ = nn::Conv2d(params_, "edge_decoder.fuse", kSideOutputs, 1, 1, rng);
}

EnhancerVars EnhancerNetwork::forward(const nn::Var& x, const nn::Var& e) const {
    const auto& xs = x.shape();
    const auto& es = e.shape();
    require(xs.c == 3 && es.c == 1, ErrorCode::Shape, "enhancer expects a 3-channel image and a 1-channel edge map");
    require(xs.n == es.n && xs.h == es.h && xs.w == es.w, ErrorCode::Shape,
            "image " + xs.str() + " and edge map " + es.str() + " differ in size");
    const int m = config_.required_multiple();
    if (xs.h % m != 0 || xs.w % m != 0) {
        fail(ErrorCode::Shape, "input " + std::to_string(xs.h) + "x" + std::to_string(xs.w) +
                                   " is not divisible by " + std::to_string(m) +
                                   "; pad or crop the image to a multiple of " + std::to_string(m));
    }

    const int L = config_.levels;
    std::vector<nn::Var> f(L);
    std::vector<nn::Var> g(L);
    for (int l = 0; l < L; ++l) {
        f[l] = image_encoder_[l](l == 0 ? x : nn::max_pool2(f[l - 1]));
        g[l] = edge_encoder_[l](l == 0 ? e : nn::max_pool2(g[l - 1]));
    }

    std::vector<nn::Var> d(L);
    d[L - 1] = f[L - 1];
    for (int l = L - 2; l >= 0; --l) {
        const nn::Var skip = attended_[l] ? attention_[l](f[l], g[l]) : f[l];
        const auto& s = f[l].shape();
        const nn::Var up = nn::leaky_relu(decoder_[l].up(nn::upsample_bilinear(d[l + 1], s.h, s.w)));
        d[l] = decoder_[l].merge(nn::concat_channels({up, skip}));
    }

    EnhancerVars out;
    out.enhanced = nn::sigmoid(image_head_(d[0]));
    std::vector<nn::Var> logits;
    for (int j = 0; j < kSideOutputs; ++j) {
        const int t = taps_[j];
        const nn::Var side = side_heads_[j](nn::concat_channels({d[t], g[t]}));
        logits.push_back(t == 0 ? side : nn::upsample_bilinear(side, xs.h, xs.w));
        out.side_edges[j] = nn::sigmoid(logits.back());
    }
    out.fused_edge = nn::sigmoid(fuse_head_(nn::concat_channels(logits)));
    return out;
}

EnhancerOutput EnhancerNetwork::run(const ImageTensor& x, const EdgeMap& e) const {
    require(x.channels() == 3, ErrorCode::InvalidArgument, "enhancer input must be RGB");
    const auto vars = forward(nn::Var::constant(to_tensor(x)),
                              nn::Var::constant(map_to_tensor(std::span<const EdgeMap>(&e, 1))));
    EnhancerOutput out;
    out.enhanced = image_from_tensor(vars.enhanced.value());
    out.fused_edge = map_from_tensor<EdgeMap>(vars.fused_edge.value());
    for (const auto& s : vars.side_edges) out.side_edges.push_back(map_from_tensor<EdgeMap>(s.value()));
    return out;
}

EdgeMap input_edges(const ImageTensor& x, EdgeSource source, const std::filesystem::path& path) {
    if (source == EdgeSource::Classical) return sobel_edges(x);
    require(!path.empty(), ErrorCode::Config, "file edge source needs a path");
    EdgeMap map = read_map<EdgeMap>(path);
    require(map.height() == x.height() && map.width() == x.width(), ErrorCode::ProviderContract,
            "edge map " + path.string() + " does not match the image size");
    return map;
}

} // namespace darktext::enhancer
