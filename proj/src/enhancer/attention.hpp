#pragma once

#include "nn/layers.hpp"

#include <string>

namespace darktext::enhancer {

// Polarized-style channel attention over image features F:
// A_ch = sigmoid(W_z(sum_p softmax_p(W_q F) * W_v F)), shape [N, C, 1, 1].
class ChannelAttention {
public:
    ChannelAttention() = default;
    ChannelAttention(nn::ParameterStore& store, const std::string& name, int channels, nn::Rng& rng);

    nn::Var operator()(const nn::Var& f) const;

    int inner_channels() const { return inner_; }

private:
    nn::Conv2d wq_;
    nn::Conv2d wv_;
    nn::Conv2d wz_;
    int inner_ = 1;
};

// Spatial attention driven by edge features E:
// A_sp = sigmoid(sum_c softmax_c(GAP(W_q E)) * W_v E), shape [N, 1, H, W].
class SpatialAttention {
public:
    SpatialAttention() = default;
    SpatialAttention(nn::ParameterStore& store, const std::string& name, int channels, nn::Rng& rng);

    nn::Var operator()(const nn::Var& e) const;

private:
    nn::Conv2d wq_;
    nn::Conv2d wv_;
};

// Edge-aware attention: A_ch(F) scales F per channel, A_sp(E) scales F per
// pixel, and the two results are summed.
class EdgeAttention {
public:
    EdgeAttention() = default;
    EdgeAttention(nn::ParameterStore& store, const std::string& name, int image_channels, int edge_channels,
                  nn::Rng& rng);

    nn::Var operator()(const nn::Var& f, const nn::Var& e) const;

    const ChannelAttention& channel() const { return channel_; }
    const SpatialAttention& spatial() const { return spatial_; }

private:
    ChannelAttention channel_;
    SpatialAttention spatial_;
};

} // namespace darktext::enhancer
