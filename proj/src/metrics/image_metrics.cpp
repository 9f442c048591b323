#include "metrics/image_metrics.hpp"

#include "core/color.hpp"
#include "core/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace darktext::metrics {

namespace {

void require_same(const ImageTensor& a, const ImageTensor& b, const char* what) {
    require(a.same_size(b) && a.channels() == b.channels(), ErrorCode::Shape,
            std::string(what) + ": images differ in shape (" + std::to_string(a.height()) + "x" +
                std::to_string(a.width()) + "x" + std::to_string(a.channels()) + " vs " + std::to_string(b.height()) +
                "x" + std::to_string(b.width()) + "x" + std::to_string(b.channels()) + ")");
}

std::vector<double> gaussian_1d(int size, double sigma) {
    std::vector<double> g(size);
    const double centre = (size - 1) / 2.0;
    for (int i = 0; i < size; ++i) g[i] = std::exp(-(i - centre) * (i - centre) / (2.0 * sigma * sigma));
    const double total = std::accumulate(g.begin(), g.end(), 0.0);
    for (double& v : g) v /= total;
    return g;
}

// Valid-mode separable filtering of one channel stored row-major.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w, const std::vector<double>& g) {
    const int k = static_cast<int>(g.size());
    const int ow = w - k + 1;
    const int oh = h - k + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += g[i] * src[static_cast<std::size_t>(y) * w + x + i];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += g[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

} // namespace

Psnr psnr(const ImageTensor& a, const ImageTensor& b) {
    require_same(a, b, "psnr");
    const auto av = a.values();
    const auto bv = b.values();
    double mse = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) mse += (av[i] - bv[i]) * (av[i] - bv[i]);
    mse /= static_cast<double>(av.size());
    if (mse == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {10.0 * std::log10(1.0 / mse), false};
}

double ssim(const ImageTensor& a, const ImageTensor& b, const SsimConfig& cfg) {
    require_same(a, b, "ssim");
    require(cfg.window >= 1 && cfg.window % 2 == 1 && cfg.sigma > 0.0, ErrorCode::Config,
            "SSIM window must be odd and positive with sigma > 0");
    require(a.height() >= cfg.window && a.width() >= cfg.window, ErrorCode::Config,
            "image " + std::to_string(a.height()) + "x" + std::to_string(a.width()) + " is smaller than the " +
                std::to_string(cfg.window) + "x" + std::to_string(cfg.window) + " SSIM window");
    const int h = a.height();
    const int w = a.width();
    const auto g = gaussian_1d(cfg.window, cfg.sigma);
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    double total = 0.0;
    std::size_t count = 0;
    for (int c = 0; c < a.channels(); ++c) {
        std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
        for (int yy_ = 0; yy_ < h; ++yy_)
            for (int xx_ = 0; xx_ < w; ++xx_) {
                const std::size_t i = static_cast<std::size_t>(yy_) * w + xx_;
                x[i] = a.at(yy_, xx_, c);
                y[i] = b.at(yy_, xx_, c);
                xx[i] = x[i] * x[i];
                yy[i] = y[i] * y[i];
                xy[i] = x[i] * y[i];
            }
        const auto mx = filter_valid(x, h, w, g);
        const auto my = filter_valid(y, h, w, g);
        const auto sxx = filter_valid(xx, h, w, g);
        const auto syy = filter_valid(yy, h, w, g);
        const auto sxy = filter_valid(xy, h, w, g);
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double vx = sxx[i] - mx[i] * mx[i];
            const double vy = syy[i] - my[i] * my[i];
            const double cov = sxy[i] - mx[i] * my[i];
            total += (2.0 * mx[i] * my[i] + cfg.c1) * (2.0 * cov + cfg.c2) /
                     ((mx[i] * mx[i] + my[i] * my[i] + cfg.c1) * (vx + vy + cfg.c2));
        }
        count += mx.size();
    }
    return total / static_cast<double>(count);
}

DarknessStats dataset_darkness(const std::vector<ImageTensor>& images, const SsimConfig& cfg) {
    require(!images.empty(), ErrorCode::EmptyCorpus, "dataset_darkness needs at least one image");
    DarknessStats stats;
    stats.count = images.size();
    double psnr_sum = 0.0;
    for (const auto& img : images) {
        const ImageTensor black(img.height(), img.width(), img.channels(), 0.0);
        const Psnr p = psnr(img, black);
        if (p.infinite) stats.psnr_vs_black.infinite = true;
        else psnr_sum += p.db;
        stats.ssim_vs_black += ssim(img, black, cfg);
        if (img.channels() == 3) {
            stats.avg_lightness += mean_lightness(img);
        } else {
            ImageTensor rgb(img.height(), img.width(), 3);
            for (int y = 0; y < img.height(); ++y)
                for (int x = 0; x < img.width(); ++x)
                    for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = img.at(y, x);
            stats.avg_lightness += mean_lightness(rgb);
        }
    }
    const double n = static_cast<double>(images.size());
    stats.psnr_vs_black.db =
        stats.psnr_vs_black.infinite ? std::numeric_limits<double>::infinity() : psnr_sum / n;
    stats.ssim_vs_black /= n;
    stats.avg_lightness /= n;
    return stats;
}

} // namespace darktext::metrics
