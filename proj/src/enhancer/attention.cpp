#include "enhancer/attention.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <algorithm>

namespace darktext::enhancer {

ChannelAttention::ChannelAttention(nn::ParameterStore& store, const std::string& name, int channels, nn::Rng& rng)
    : inner_(std::max(1, channels / 2)) {
    wq_ = nn::Conv2d(store, name + ".wq", channels, 1, 1, rng);
    wv_ = nn::Conv2d(store, name + ".wv", channels, inner_, 1, rng);
    wz_ = nn::Conv2d(store, name + ".wz", inner_, channels, 1, rng);
}

nn::Var ChannelAttention::operator()(const nn::Var& f) const {
    const nn::Var weights = nn::softmax_spatial(wq_(f));
    const nn::Var pooled = nn::spatial_weighted_sum(wv_(f), weights);
    return nn::sigmoid(wz_(pooled));
}

SpatialAttention::SpatialAttention(nn::ParameterStore& store, const std::string& name, int channels, nn::Rng& rng) {
    const int inner = std::max(1, channels / 2);
    wq_ = nn::Conv2d(store, name + ".wq", channels, inner, 1, rng);
    wv_ = nn::Conv2d(store, name + ".wv", channels, inner, 1, rng);
}

nn::Var SpatialAttention::operator()(const nn::Var& e) const {
    const nn::Var weights = nn::softmax_channels(nn::global_avg_pool(wq_(e)));
    return nn::sigmoid(nn::channel_weighted_sum(wv_(e), weights));
}

EdgeAttention::EdgeAttention(nn::ParameterStore& store, const std::string& name, int image_channels,
                             int edge_channels, nn::Rng& rng)
    : channel_(store, name + ".channel", image_channels, rng), spatial_(store, name + ".spatial", edge_channels, rng) {}

nn::Var EdgeAttention::operator()(const nn::Var& f, const nn::Var& e) const {
    require(f.shape().n == e.shape().n && f.shape().h == e.shape().h && f.shape().w == e.shape().w, ErrorCode::Shape,
            "edge attention needs image and edge features of equal spatial size, got " + f.shape().str() +
                " and " + e.shape().str());
    return nn::add(nn::mul_channelwise(f, channel_(f)), nn::mul_spatialwise(f, spatial_(e)));
}

} // namespace darktext::enhancer
