#pragma once

#include "core/heatmap.hpp"
#include "losses/ms_ssim.hpp"
#include "nn/autograd.hpp"

#include <array>
#include <span>
#include <string>

namespace darktext::losses {

// Huber-style reconstruction loss, mean over all elements:
// 0.5 d^2 / delta for |d| < delta, |d| - 0.5 delta otherwise.
nn::Var smooth_l1(const nn::Var& x_hat, const nn::Var& y, double delta = 1.0);

// Mean absolute difference of two region-score maps of equal shape.
nn::Var text_detection_loss(const nn::Var& score_hat, const nn::Var& score_gt);
// Scores both batches with the provider first; the provider must map
// [N, C, H, W] to [N, 1, H / s, W / s].
nn::Var text_detection_loss(const HeatmapProvider& provider, const nn::Var& x_hat, const nn::Var& y);

// Differentiable stand-in for a learned text detector: a fixed scorer that
// responds to dense luma gradients, R = tanh(gain * |Sobel(luma)|^2).
class SurrogateTextScorer final : public HeatmapProvider {
public:
    explicit SurrogateTextScorer(double gain = 1.0) : gain_(gain) {}

    RegionHeatmap heatmap(const ImageTensor& img) const override;
    nn::Var score(const nn::Var& images) const override;
    bool differentiable() const override { return true; }
    double gain() const { return gain_; }

private:
    double gain_;
};

inline constexpr double kProbabilityEpsilon = 1e-7;

struct EdgeLossParams {
    double lambda = 1.1;
};

// Class-balanced edge BCE per image: with Y+ / Y- the positive / negative
// pixel sets of that image, alpha = lambda |Y+| / |I| weights the negatives
// and beta = |Y-| / |I| the positives; the negated log-likelihood is summed
// and divided by |I|, then averaged over the batch. Probabilities are
// clamped to [eps, 1 - eps]. `gt` is a constant 0/1 map.
nn::Var balanced_edge_bce(const nn::Var& pred, const nn::Tensor& gt, const EdgeLossParams& params = {});

// Sum of the balanced BCE over the three side outputs and the fused output.
nn::Var edge_reconstruction_loss(std::span<const nn::Var> side_edges, const nn::Var& fused, const nn::Tensor& gt,
                                 const EdgeLossParams& params = {});

struct LossWeights {
    double recons = 0.2125;
    double text = 0.425;
    double ssim_ms = 0.15;
    double edge = 0.2125;
};

struct EnhancementLossTerms {
    nn::Var recons;
    nn::Var text;
    nn::Var ssim_ms;
    nn::Var edge;
};

// Weighted sum; throws a numeric error naming the first non-finite term.
nn::Var total_enhancement_loss(const EnhancementLossTerms& terms, const LossWeights& weights);

// Throws ErrorCode::Numeric when `value` is not finite.
void check_finite(const nn::Var& value, const std::string& term);

} // namespace darktext::losses
