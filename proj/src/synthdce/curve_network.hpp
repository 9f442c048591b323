#pragma once

#include "core/image.hpp"
#include "nn/layers.hpp"

#include <cstdint>
#include <vector>

namespace darktext::synth {

struct CurveNetworkConfig {
    int width = 32;   // trunk channels
    void validate() const;
};

// Per-pixel curve parameters, [N, 3, H, W] each: H from a tanh head in
// [-1, 1], U from a ReLU head in [0, inf).
struct CurveParams {
    nn::Var h;
    nn::Var u;
};

// Seven 3x3 convolutions in the Zero-DCE arrangement: four plain layers,
// two layers fed by symmetric skip concatenations, and the two output heads
// reading the concatenation of the first and sixth feature maps. The heads
// start at zero, so an untrained network applies the identity curve.
class CurveNetwork {
public:
    CurveNetwork(const CurveNetworkConfig& config, std::uint64_t seed);

    CurveParams forward(const nn::Var& y) const;

    const CurveNetworkConfig& config() const { return config_; }
    nn::ParameterStore& parameters() { return params_; }
    const nn::ParameterStore& parameters() const { return params_; }

private:
    CurveNetworkConfig config_;
    nn::ParameterStore params_;
    std::vector<nn::Conv2d> trunk_;
    nn::Conv2d head_h_;
    nn::Conv2d head_u_;
};

// x_hat = -(H + U) y^2 + (1 + H) y, optionally clipped to [0, 1].
nn::Var apply_curve(const nn::Var& y, const CurveParams& params, bool clamp);

// One forward pass followed by the clamped curve.
ImageTensor synthesize(const CurveNetwork& net, const ImageTensor& y);

} // namespace darktext::synth
