#pragma once

#include "nn/autograd.hpp"

#include <vector>

// Differentiable tensor ops over [N, C, H, W] values. Binary elementwise ops
// require identical shapes; broadcasting is explicit (mul_channelwise,
// mul_spatialwise, ...).
namespace darktext::nn {

// elementwise
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var add_scalar(const Var& a, double s);
Var scale(const Var& a, double s);
Var square(const Var& a);
Var abs(const Var& a);
Var log(const Var& a);
Var exp(const Var& a);
Var pow_scalar(const Var& a, double p);
Var clamp_min(const Var& a, double lo);
Var sigmoid(const Var& a);
Var tanh(const Var& a);
// Right derivative at 0, so a head initialised to exactly zero still learns.
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope = 0.2);

// reductions
Var sum(const Var& a);
Var mean(const Var& a);
Var mean_per_sample(const Var& a);   // [N,C,H,W] -> [N,1,1,1]
Var global_avg_pool(const Var& a);   // [N,C,H,W] -> [N,C,1,1]
Var channel_mean(const Var& a);      // [N,C,H,W] -> [N,1,H,W]

// resampling
Var avg_pool(const Var& a, int k);   // k x k, stride k; trailing remainder dropped
Var max_pool2(const Var& a);
Var upsample_bilinear(const Var& a, int out_h, int out_w);
Var concat_channels(const std::vector<Var>& parts);
Var diff_x(const Var& a);            // a[..., x+1] - a[..., x]  -> W-1 columns
Var diff_y(const Var& a);            // a[..., y+1, :] - a[..., y, :] -> H-1 rows
Var crop(const Var& a, int y0, int x0, int h, int w);
// Edge-replicating border of `pad` pixels on every side.
Var pad_replicate(const Var& a, int pad);

// Per-channel KxK filter with zero padding `pad` (kernel shared by all channels).
Var depthwise_filter(const Var& a, const Tensor& kernel, int pad);

// attention primitives
Var softmax_spatial(const Var& a);   // softmax over H*W for each (n, c)
Var softmax_channels(const Var& a);  // softmax over C for each (n, y, x)
Var mul_channelwise(const Var& x, const Var& a);      // a: [N,C,1,1]
Var mul_spatialwise(const Var& x, const Var& a);      // a: [N,1,H,W]
Var spatial_weighted_sum(const Var& v, const Var& p); // v:[N,C,H,W], p:[N,1,H,W] -> [N,C,1,1]
Var channel_weighted_sum(const Var& v, const Var& p); // v:[N,C,H,W], p:[N,C,1,1] -> [N,1,H,W]

// convolution (implemented in conv.cpp); weight [Cout, Cin, K, K], bias [1, Cout, 1, 1]
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);

// Bilinear sampling weights (half-pixel centres, edge clamped) shared with
// the non-differentiable image resizers.
struct BilinearTap {
    int i0 = 0;
    int i1 = 0;
    double w0 = 1.0;
    double w1 = 0.0;
};
std::vector<BilinearTap> bilinear_taps(int in_size, int out_size);

} // namespace darktext::nn
