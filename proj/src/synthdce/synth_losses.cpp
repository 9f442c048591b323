#include "synthdce/synth_losses.hpp"

#include "core/error.hpp"
#include "losses/losses.hpp"
#include "nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace darktext::synth {

namespace {

// Binary entropy of |d|, elementwise. The derivative log((1 - p) / p) is
// evaluated at p clamped away from 0 and 1 and vanishes where d = 0.
nn::Var abs_binary_entropy(const nn::Var& d) {
    const nn::Tensor& dv = d.value();
    nn::Tensor out(dv.shape());
    for (std::size_t i = 0; i < dv.size(); ++i) {
        const double p = std::min(std::abs(dv[i]), 1.0);
        double h = 0.0;
        if (p > 0.0) h -= p * std::log(p);
        if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
        out[i] = h;
    }
    return nn::make_result(std::move(out), {d}, [](nn::Node& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        nn::Tensor& g = parent.grad_buffer();
        const double eps = losses::kProbabilityEpsilon;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = parent.value[i];
            if (v == 0.0 || std::abs(v) >= 1.0) continue;
            const double p = std::clamp(std::abs(v), eps, 1.0 - eps);
            g[i] += self.grad[i] * std::log((1.0 - p) / p) * (v > 0.0 ? 1.0 : -1.0);
        }
    });
}

void require_tv_size(const nn::Shape& s, const char* what) {
    require(s.h >= 2 && s.w >= 2, ErrorCode::Shape,
            std::string(what) + " needs at least 2x2 pixels, got " + s.str());
}

} // namespace

nn::Var proximity_loss(const nn::Var& x_hat, const nn::Var& x) {
    nn::require_same_shape(x_hat.shape(), x.shape(), "proximity_loss");
    const auto& s = x.shape();
    require_tv_size(s, "proximity_loss");
    const nn::Var d = nn::sub(x_hat, x);
    const nn::Var l1 = nn::mean(nn::abs(d));
    const nn::Var entropy = nn::mean(abs_binary_entropy(d));
    const nn::Var gx = nn::crop(nn::diff_x(d), 0, 0, s.h - 1, s.w - 1);
    const nn::Var gy = nn::crop(nn::diff_y(d), 0, 0, s.h - 1, s.w - 1);
    const nn::Var smooth = nn::mean(nn::add(nn::abs(gx), nn::abs(gy)));
    return nn::add(nn::add(l1, entropy), smooth);
}

nn::Var spatial_consistency_loss(const nn::Var& x_hat, const nn::Var& y, const SpaConfig& cfg) {
    require(cfg.region >= 1, ErrorCode::Config, "spatial consistency region must be at least 1 pixel");
    nn::require_same_shape(x_hat.shape(), y.shape(), "spatial_consistency_loss");
    const auto& s = x_hat.shape();
    require(s.h >= cfg.region && s.w >= cfg.region, ErrorCode::Shape,
            "image " + s.str() + " is smaller than one " + std::to_string(cfg.region) + "x" +
                std::to_string(cfg.region) + " region");

    const nn::Var xp = nn::avg_pool(nn::channel_mean(x_hat), cfg.region);
    const nn::Var yp = nn::avg_pool(nn::channel_mean(nn::Var::constant(y.value())), cfg.region);
    const auto& ps = xp.shape();
    const double regions = static_cast<double>(ps.h) * ps.w;

    auto direction = [&](const nn::Var& dx, const nn::Var& dy) {
        nn::Tensor target = dy.value();
        for (double& v : target.values()) v = cfg.alpha * std::log10(9.0 * std::abs(v) + 1.0);
        return nn::sum(nn::square(nn::sub(nn::abs(dx), nn::Var::constant(std::move(target)))));
    };
    nn::Var total;
    if (ps.w >= 2) total = direction(nn::diff_x(xp), nn::diff_x(yp));
    if (ps.h >= 2) {
        const nn::Var vertical = direction(nn::diff_y(xp), nn::diff_y(yp));
        total = total.valid() ? nn::add(total, vertical) : vertical;
    }
    if (!total.valid()) return nn::scale(nn::sum(xp), 0.0);
    // Each unordered neighbour pair appears once above and twice in the sum.
    return nn::scale(total, 2.0 / (regions * ps.n));
}

nn::Var tv_loss(const nn::Var& z) {
    const auto& s = z.shape();
    require_tv_size(s, "tv_loss");
    const nn::Var gx = nn::crop(nn::diff_x(z), 0, 0, s.h - 1, s.w - 1);
    const nn::Var gy = nn::crop(nn::diff_y(z), 0, 0, s.h - 1, s.w - 1);
    return nn::mean(nn::square(nn::add(nn::abs(gx), nn::abs(gy))));
}

nn::Var total_synthesis_loss(const SynthLossTerms& terms, const SynthLossWeights& weights) {
    losses::check_finite(terms.prox, "prox");
    losses::check_finite(terms.spa, "spa");
    losses::check_finite(terms.tv_h, "tv_h");
    losses::check_finite(terms.tv_u, "tv_u");
    return nn::add(nn::add(nn::scale(terms.prox, weights.prox), nn::scale(terms.spa, weights.spa)),
                   nn::add(nn::scale(terms.tv_h, weights.tv_h), nn::scale(terms.tv_u, weights.tv_u)));
}

} // namespace darktext::synth
