#include "core/canny.hpp"

#include "core/error.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <vector>

namespace darktext {

namespace {

int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

} // namespace

ImageTensor gaussian_blur(const ImageTensor& gray, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += kernel[i + radius];
    }
    for (double& k : kernel) k /= total;

    const int h = gray.height();
    const int w = gray.width();
    ImageTensor tmp(h, w, 1);
    ImageTensor out(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * gray.at(y, reflect(x + i, w));
            tmp.at(y, x) = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at(reflect(y + i, h), x);
            out.at(y, x) = acc;
        }
    return out;
}

EdgeMap canny_edges(const ImageTensor& img, const CannyParams& params) {
    require(params.low_threshold >= 0.0 && params.low_threshold < params.high_threshold &&
                params.high_threshold <= 1.0,
            ErrorCode::InvalidArgument, "canny thresholds must satisfy 0 <= low < high <= 1");
    const int h = img.height();
    const int w = img.width();
    EdgeMap edges(h, w, 0.0);
    const ImageTensor smooth = gaussian_blur(to_gray(img), params.sigma);

    std::vector<double> gx(static_cast<std::size_t>(h) * w), gy(gx.size()), mag(gx.size());
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto p = [&](int dy, int dx) { return smooth.at(clamp_index(y + dy, h), clamp_index(x + dx, w)); };
            const double sx = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            const double sy = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = std::hypot(sx, sy);
            max_mag = std::max(max_mag, mag[i]);
        }
    // Flat input (including 1x1): no edges. The tolerance absorbs blur round-off.
    if (max_mag <= 1e-12) return edges;

    const double high = params.high_threshold * max_mag;
    const double low = params.low_threshold * max_mag;
    auto mag_at = [&](int y, int x) {
        if (y < 0 || y >= h || x < 0 || x >= w) return 0.0;
        return mag[static_cast<std::size_t>(y) * w + x];
    };

    // 0 = suppressed, 1 = weak, 2 = strong
    std::vector<unsigned char> state(mag.size(), 0);
    std::vector<std::size_t> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m < low) continue;
            double angle = std::atan2(gy[i], gx[i]) * 180.0 / M_PI;
            if (angle < 0) angle += 180.0;
            int dx = 1, dy = 0;
            if (angle >= 22.5 && angle < 67.5) {
                dx = 1;
                dy = 1;
            } else if (angle >= 67.5 && angle < 112.5) {
                dx = 0;
                dy = 1;
            } else if (angle >= 112.5 && angle < 157.5) {
                dx = -1;
                dy = 1;
            }
            // ties broken toward the lower/left neighbour so plateaus keep one pixel
            if (m < mag_at(y + dy, x + dx) || m <= mag_at(y - dy, x - dx)) continue;
            state[i] = m >= high ? 2 : 1;
            if (state[i] == 2) stack.push_back(i);
        }

    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int y = static_cast<int>(i / w);
        const int x = static_cast<int>(i % w);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int ny = y + dy;
                const int nx = x + dx;
                if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (state[j] == 1) {
                    state[j] = 2;
                    stack.push_back(j);
                }
            }
    }
    for (std::size_t i = 0; i < state.size(); ++i) edges.values()[i] = state[i] == 2 ? 1.0 : 0.0;
    return edges;
}

} // namespace darktext
