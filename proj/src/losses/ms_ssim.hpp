#pragma once

#include "nn/autograd.hpp"

#include <vector>

namespace darktext::losses {

struct MsSsimConfig {
    int scales = 5;
    // Per-scale exponents, finest first. Only the first `scales` entries are
    // used, renormalised to sum to one.
    std::vector<double> weights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    int window = 11;
    double sigma = 1.5;
    double c1 = 0.01 * 0.01;
    double c2 = 0.03 * 0.03;   // the structure stabiliser is c2 / 2

    void validate() const;
};

// Largest scale count whose coarsest level still fits the window.
int max_feasible_scales(int height, int width, const MsSsimConfig& cfg);

// Multi-scale SSIM of [N, C, H, W] batches:
// mean(l * cs at the coarsest scale)^w_M * prod_j mean(cs_j)^w_j.
// Scale means are clamped at 1e-8 before exponentiation. With one scale the
// result is plain SSIM.
nn::Var ms_ssim(const nn::Var& x, const nn::Var& y, const MsSsimConfig& cfg);
nn::Var ms_ssim_loss(const nn::Var& x, const nn::Var& y, const MsSsimConfig& cfg);

// Normalised 2-D Gaussian window of side `size`.
nn::Tensor gaussian_window(int size, double sigma);

} // namespace darktext::losses
