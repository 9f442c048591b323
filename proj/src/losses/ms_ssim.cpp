#include "losses/ms_ssim.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <cmath>
#include <numeric>

namespace darktext::losses {

void MsSsimConfig::validate() const {
    require(scales >= 1, ErrorCode::Config, "MS-SSIM needs at least one scale");
    require(static_cast<int>(weights.size()) >= scales, ErrorCode::Config,
            "MS-SSIM has " + std::to_string(weights.size()) + " exponents for " + std::to_string(scales) +
                " scales");
    require(window >= 1 && window % 2 == 1 && sigma > 0.0, ErrorCode::Config,
            "MS-SSIM window must be odd and positive with sigma > 0");
    require(c1 > 0.0 && c2 > 0.0, ErrorCode::Config, "SSIM stabilisers must be positive");
    double total = 0.0;
    for (int j = 0; j < scales; ++j) {
        require(weights[j] >= 0.0, ErrorCode::Config, "MS-SSIM exponents must be non-negative");
        total += weights[j];
    }
    require(total > 0.0, ErrorCode::Config, "MS-SSIM exponents sum to zero");
}

int max_feasible_scales(int height, int width, const MsSsimConfig& cfg) {
    int m = 0;
    while (height >= cfg.window && width >= cfg.window) {
        ++m;
        height /= 2;
        width /= 2;
    }
    return m;
}

nn::Tensor gaussian_window(int size, double sigma) {
    std::vector<double> g(size);
    const double centre = (size - 1) / 2.0;
    for (int i = 0; i < size; ++i) g[i] = std::exp(-(i - centre) * (i - centre) / (2.0 * sigma * sigma));
    const double total = std::accumulate(g.begin(), g.end(), 0.0);
    nn::Tensor k(nn::Shape{1, 1, size, size});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) k[y * size + x] = g[y] * g[x] / (total * total);
    return k;
}

namespace {

struct ScaleTerms {
    nn::Var cs;     // contrast-structure map
    nn::Var ssim;   // luminance * contrast-structure map
};

ScaleTerms scale_terms(const nn::Var& x, const nn::Var& y, const nn::Tensor& window, const MsSsimConfig& cfg) {
    using namespace nn;
    const Var mu_x = depthwise_filter(x, window, 0);
    const Var mu_y = depthwise_filter(y, window, 0);
    const Var mu_xx = square(mu_x);
    const Var mu_yy = square(mu_y);
    const Var mu_xy = mul(mu_x, mu_y);
    const Var var_x = sub(depthwise_filter(square(x), window, 0), mu_xx);
    const Var var_y = sub(depthwise_filter(square(y), window, 0), mu_yy);
    const Var cov = sub(depthwise_filter(mul(x, y), window, 0), mu_xy);

    const Var cs = div(add_scalar(scale(cov, 2.0), cfg.c2), add_scalar(add(var_x, var_y), cfg.c2));
    const Var lum = div(add_scalar(scale(mu_xy, 2.0), cfg.c1), add_scalar(add(mu_xx, mu_yy), cfg.c1));
    return {cs, mul(lum, cs)};
}

} // namespace

nn::Var ms_ssim(const nn::Var& x, const nn::Var& y, const MsSsimConfig& cfg) {
    cfg.validate();
    nn::require_same_shape(x.shape(), y.shape(), "ms_ssim");
    const int feasible = max_feasible_scales(x.shape().h, x.shape().w, cfg);
    if (feasible < cfg.scales) {
        fail(ErrorCode::Config, "a " + std::to_string(x.shape().h) + "x" + std::to_string(x.shape().w) +
                                    " image supports at most " + std::to_string(feasible) + " MS-SSIM scale(s) with a " +
                                    std::to_string(cfg.window) + "-pixel window, " + std::to_string(cfg.scales) +
                                    " requested");
    }
    const double total = std::accumulate(cfg.weights.begin(), cfg.weights.begin() + cfg.scales, 0.0);
    const nn::Tensor window = gaussian_window(cfg.window, cfg.sigma);

    nn::Var xs = x;
    nn::Var ys = y;
    nn::Var result;
    for (int j = 0; j < cfg.scales; ++j) {
        const ScaleTerms terms = scale_terms(xs, ys, window, cfg);
        const bool coarsest = j + 1 == cfg.scales;
        const nn::Var m = nn::clamp_min(nn::mean(coarsest ? terms.ssim : terms.cs), 1e-8);
        const nn::Var factor = nn::pow_scalar(m, cfg.weights[j] / total);
        result = result.valid() ? nn::mul(result, factor) : factor;
        if (!coarsest) {
            xs = nn::avg_pool(xs, 2);
            ys = nn::avg_pool(ys, 2);
        }
    }
    return result;
}

nn::Var ms_ssim_loss(const nn::Var& x, const nn::Var& y, const MsSsimConfig& cfg) {
    return nn::add_scalar(nn::scale(ms_ssim(x, y, cfg), -1.0), 1.0);
}

} // namespace darktext::losses
