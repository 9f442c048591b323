#pragma once

#include "core/image.hpp"

#include <vector>

namespace darktext::metrics {

struct Psnr {
    double db = 0.0;
    bool infinite = false;   // identical inputs
};

// Peak 1.0: 10 log10(1 / MSE).
Psnr psnr(const ImageTensor& a, const ImageTensor& b);

struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double c1 = 0.01 * 0.01;
    double c2 = 0.03 * 0.03;
};

// Single-scale SSIM, Gaussian-weighted over valid window positions, averaged
// over positions and channels.
double ssim(const ImageTensor& a, const ImageTensor& b, const SsimConfig& cfg = {});

// Darkness of a corpus, measured against all-black references.
struct DarknessStats {
    Psnr psnr_vs_black;       // infinite when any image is pure black
    double ssim_vs_black = 0.0;
    double avg_lightness = 0.0;   // mean L* / 100
    std::size_t count = 0;
};

DarknessStats dataset_darkness(const std::vector<ImageTensor>& images, const SsimConfig& cfg = {});

} // namespace darktext::metrics
