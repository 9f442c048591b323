#include "synthdce/curve_network.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <algorithm>

namespace darktext::synth {

void CurveNetworkConfig::validate() const {
    require(width >= 1, ErrorCode::Config, "curve network width must be positive");
}

CurveNetwork::CurveNetwork(const CurveNetworkConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    nn::Rng rng(seed);
    const int c = config_.width;
    const int inputs[] = {3, c, c, c, 2 * c, 2 * c};
    for (int i = 0; i < 6; ++i) {
        trunk_.emplace_back(params_, "trunk.conv" + std::to_string(i + 1), inputs[i], c, 3, rng);
    }
    head_h_ = nn::Conv2d(params_, "head.h", 2 * c, 3, 3, rng, nn::Init::Zero);
    head_u_ = nn::Conv2d(params_, "head.u", 2 * c, 3, 3, rng, nn::Init::Zero);
}

CurveParams CurveNetwork::forward(const nn::Var& y) const {
    require(y.shape().c == 3, ErrorCode::Shape, "curve network expects a 3-channel image, got " + y.shape().str());
    const nn::Var x1 = nn::relu(trunk_[0](y));
    const nn::Var x2 = nn::relu(trunk_[1](x1));
    const nn::Var x3 = nn::relu(trunk_[2](x2));
    const nn::Var x4 = nn::relu(trunk_[3](x3));
    const nn::Var x5 = nn::relu(trunk_[4](nn::concat_channels({x3, x4})));
    const nn::Var x6 = nn::relu(trunk_[5](nn::concat_channels({x2, x5})));
    const nn::Var features = nn::concat_channels({x1, x6});
    return {nn::tanh(head_h_(features)), nn::relu(head_u_(features))};
}

nn::Var apply_curve(const nn::Var& y, const CurveParams& params, bool clamp) {
    nn::require_same_shape(y.shape(), params.h.shape(), "apply_curve (H)");
    nn::require_same_shape(y.shape(), params.u.shape(), "apply_curve (U)");
    const nn::Var quadratic = nn::mul(nn::add(params.h, params.u), nn::square(y));
    const nn::Var linear = nn::mul(nn::add_scalar(params.h, 1.0), y);
    nn::Var out = nn::sub(linear, quadratic);
    if (!clamp) return out;
    nn::Tensor clipped = out.value();
    for (double& v : clipped.values()) v = std::clamp(v, 0.0, 1.0);
    // Gradient passes where the curve stayed inside [0, 1].
    return nn::make_result(std::move(clipped), {out}, [](nn::Node& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        nn::Tensor& g = parent.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = parent.value[i];
            if (v >= 0.0 && v <= 1.0) g[i] += self.grad[i];
        }
    });
}

ImageTensor synthesize(const CurveNetwork& net, const ImageTensor& y) {
    require(y.channels() == 3, ErrorCode::InvalidArgument, "synthesis input must be RGB");
    const nn::Var input = nn::Var::constant(to_tensor(y));
    return image_from_tensor(apply_curve(input, net.forward(input), true).value());
}

} // namespace darktext::synth
