#pragma once

#include "nn/autograd.hpp"

namespace darktext::synth {

// mean |x_hat - x|
// + mean binary entropy of |x_hat - x| (natural log, 0 log 0 = 0)
// + mean anisotropic total variation of (x_hat - x).
nn::Var proximity_loss(const nn::Var& x_hat, const nn::Var& x);

struct SpaConfig {
    int region = 4;
    double alpha = 0.05;
};

// Channel-averaged images pooled to region x region means; every ordered
// pair of 4-neighbouring regions (i, j) adds
// (|X_i - X_j| - alpha * log10(9 |Y_i - Y_j| + 1))^2, the sum is divided by
// the region count and averaged over the batch. `y` is treated as constant.
nn::Var spatial_consistency_loss(const nn::Var& x_hat, const nn::Var& y, const SpaConfig& cfg = {});

// Mean over channels and the (H-1) x (W-1) forward-difference sites of
// (|dZ/dx| + |dZ/dy|)^2.
nn::Var tv_loss(const nn::Var& z);

struct SynthLossWeights {
    double prox = 1.0;
    double spa = 20.0;
    double tv_h = 10.0;
    double tv_u = 10.0;
};

struct SynthLossTerms {
    nn::Var prox;
    nn::Var spa;
    nn::Var tv_h;
    nn::Var tv_u;
};

// Weighted sum; throws a numeric error naming the first non-finite term.
nn::Var total_synthesis_loss(const SynthLossTerms& terms, const SynthLossWeights& weights);

} // namespace darktext::synth
