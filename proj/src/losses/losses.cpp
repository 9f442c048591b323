#include "losses/losses.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace darktext::losses {

nn::Var smooth_l1(const nn::Var& x_hat, const nn::Var& y, double delta) {
    require(delta > 0.0, ErrorCode::InvalidArgument, "smooth_l1 delta must be positive");
    nn::require_same_shape(x_hat.shape(), y.shape(), "smooth_l1");
    const nn::Var d = nn::sub(x_hat, y);
    const nn::Tensor& dv = d.value();
    nn::Tensor out(dv.shape());
    for (std::size_t i = 0; i < dv.size(); ++i) {
        const double a = std::abs(dv[i]);
        out[i] = a < delta ? 0.5 * dv[i] * dv[i] / delta : a - 0.5 * delta;
    }
    const nn::Var per_element = nn::make_result(std::move(out), {d}, [delta](nn::Node& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        nn::Tensor& g = parent.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = parent.value[i];
            const double slope = std::abs(v) < delta ? v / delta : (v > 0.0 ? 1.0 : -1.0);
            g[i] += self.grad[i] * slope;
        }
    });
    return nn::mean(per_element);
}

nn::Var text_detection_loss(const nn::Var& score_hat, const nn::Var& score_gt) {
    if (!(score_hat.shape() == score_gt.shape())) {
        fail(ErrorCode::ProviderContract, "region score maps differ in shape: " + score_hat.shape().str() + " vs " +
                                              score_gt.shape().str());
    }
    return nn::mean(nn::abs(nn::sub(score_hat, score_gt)));
}

nn::Var text_detection_loss(const HeatmapProvider& provider, const nn::Var& x_hat, const nn::Var& y) {
    nn::require_same_shape(x_hat.shape(), y.shape(), "text_detection_loss");
    const nn::Var r_hat = provider.score(x_hat);
    const nn::Var r_gt = provider.score(y);
    const auto& s = x_hat.shape();
    const int k = provider.downscale();
    const nn::Shape want{s.n, 1, s.h / k, s.w / k};
    if (!(r_hat.shape() == want) || !(r_gt.shape() == want)) {
        fail(ErrorCode::ProviderContract, "heatmap provider returned " + r_hat.shape().str() + " / " +
                                              r_gt.shape().str() + ", expected " + want.str());
    }
    return text_detection_loss(r_hat, r_gt);
}

nn::Var SurrogateTextScorer::score(const nn::Var& images) const {
    const auto& s = images.shape();
    nn::Var luma = images;
    if (s.c == 3) {
        nn::Tensor w(nn::Shape{1, 3, 1, 1}, std::vector<double>{0.299, 0.587, 0.114});
        luma = nn::conv2d(images, nn::Var::constant(std::move(w)), nn::Var::constant(nn::Tensor(nn::Shape{1, 1, 1, 1})),
                          1, 0);
    } else {
        require(s.c == 1, ErrorCode::InvalidArgument, "text scorer expects 1 or 3 channels");
    }
    const nn::Tensor kx(nn::Shape{1, 1, 3, 3}, std::vector<double>{-1, 0, 1, -2, 0, 2, -1, 0, 1});
    const nn::Tensor ky(nn::Shape{1, 1, 3, 3}, std::vector<double>{-1, -2, -1, 0, 0, 0, 1, 2, 1});
    // replicated borders keep flat regions at zero response up to the frame edge
    const nn::Var padded = nn::pad_replicate(luma, 1);
    const nn::Var gx = nn::depthwise_filter(padded, kx, 0);
    const nn::Var gy = nn::depthwise_filter(padded, ky, 0);
    return nn::tanh(nn::scale(nn::add(nn::square(gx), nn::square(gy)), gain_));
}

RegionHeatmap SurrogateTextScorer::heatmap(const ImageTensor& img) const {
    return map_from_tensor<RegionHeatmap>(score(nn::Var::constant(to_tensor(img))).value());
}

nn::Var balanced_edge_bce(const nn::Var& pred, const nn::Tensor& gt, const EdgeLossParams& params) {
    require(params.lambda > 0.0, ErrorCode::InvalidArgument, "edge loss lambda must be positive");
    nn::require_same_shape(pred.shape(), gt.shape(), "balanced_edge_bce");
    const auto& s = pred.shape();
    require(s.numel() > 0, ErrorCode::InvalidArgument, "edge loss needs at least one pixel");
    const std::size_t per_image = static_cast<std::size_t>(s.c) * s.h * s.w;

    // Per-pixel weight: -alpha on negatives (applied to log(1 - p)), -beta on
    // positives (applied to log p), already divided by |I| and the batch size.
    std::vector<double> weight(s.numel());
    for (int n = 0; n < s.n; ++n) {
        const std::size_t base = n * per_image;
        double positives = 0.0;
        for (std::size_t i = 0; i < per_image; ++i) positives += gt[base + i] > 0.5 ? 1.0 : 0.0;
        const double total = static_cast<double>(per_image);
        const double alpha = params.lambda * positives / total;
        const double beta = (total - positives) / total;
        for (std::size_t i = 0; i < per_image; ++i) {
            weight[base + i] = (gt[base + i] > 0.5 ? beta : alpha) / (total * s.n);
        }
    }

    const nn::Tensor& p = pred.value();
    double loss = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
        loss -= weight[i] * (gt[i] > 0.5 ? std::log(q) : std::log(1.0 - q));
    }
    return nn::make_result(nn::Tensor(nn::Shape{1, 1, 1, 1}, loss), {pred},
                           [gt, weight = std::move(weight)](nn::Node& self) {
                               auto& parent = *self.parents[0];
                               if (!parent.requires_grad) return;
                               nn::Tensor& g = parent.grad_buffer();
                               const double up = self.grad[0];
                               for (std::size_t i = 0; i < g.size(); ++i) {
                                   const double v = parent.value[i];
                                   if (v < kProbabilityEpsilon || v > 1.0 - kProbabilityEpsilon) continue;
                                   g[i] += up * weight[i] * (gt[i] > 0.5 ? -1.0 / v : 1.0 / (1.0 - v));
                               }
                           });
}

nn::Var edge_reconstruction_loss(std::span<const nn::Var> side_edges, const nn::Var& fused, const nn::Tensor& gt,
                                 const EdgeLossParams& params) {
    require(side_edges.size() == 3, ErrorCode::Config,
            "edge reconstruction expects 3 side outputs, got " + std::to_string(side_edges.size()));
    nn::Var total = balanced_edge_bce(fused, gt, params);
    for (const auto& side : side_edges) total = nn::add(total, balanced_edge_bce(side, gt, params));
    return total;
}

void check_finite(const nn::Var& value, const std::string& term) {
    for (double v : value.value().values()) {
        if (!std::isfinite(v)) fail(ErrorCode::Numeric, "loss term '" + term + "' is not finite");
    }
}

nn::Var total_enhancement_loss(const EnhancementLossTerms& terms, const LossWeights& weights) {
    check_finite(terms.recons, "recons");
    check_finite(terms.text, "text");
    check_finite(terms.ssim_ms, "ssim_ms");
    check_finite(terms.edge, "edge");
    return nn::add(nn::add(nn::scale(terms.recons, weights.recons), nn::scale(terms.text, weights.text)),
                   nn::add(nn::scale(terms.ssim_ms, weights.ssim_ms), nn::scale(terms.edge, weights.edge)));
}

} // namespace darktext::losses
