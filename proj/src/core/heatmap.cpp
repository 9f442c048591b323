#include "core/heatmap.hpp"

#include "core/error.hpp"
#include "core/image_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

namespace darktext {

namespace {

// Homography taking the unit square (0,0),(1,0),(1,1),(0,1) onto the quad.
std::optional<Eigen::Matrix3d> square_to_quad(const std::array<Point, 4>& q) {
    const std::array<Point, 4> src{Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double x = src[i].x, y = src[i].y, u = q[i].x, v = q[i].y;
        a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        b(2 * i) = u;
        b(2 * i + 1) = v;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
    Eigen::Matrix3d m;
    m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    return m;
}

} // namespace

RegionHeatmap gaussian_box_heatmap(const std::vector<TextBox>& boxes, int height, int width, double peak) {
    require(peak > 0.0 && peak <= 1.0, ErrorCode::InvalidArgument, "heatmap peak must lie in (0, 1]");
    RegionHeatmap out(height, width, 0.0);
    const double sigma2 = kBoxGaussianSigma * kBoxGaussianSigma;
    const double support = 3.0 * kBoxGaussianSigma;
    for (const auto& box : boxes) {
        if (!box.legible()) continue;
        const auto h = square_to_quad(box.quad());
        if (!h) continue;
        const Eigen::Matrix3d inv = h->inverse();
        const Rect r = box.aabb();
        const double pad_x = r.w * (support - 0.5) + 1.0;
        const double pad_y = r.h * (support - 0.5) + 1.0;
        const int x0 = std::max(0, static_cast<int>(std::floor(r.u - pad_x)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(r.right() + pad_x)));
        const int y0 = std::max(0, static_cast<int>(std::floor(r.v - pad_y)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(r.bottom() + pad_y)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const Eigen::Vector3d s = inv * Eigen::Vector3d(x, y, 1.0);
                if (std::fabs(s(2)) < 1e-12) continue;
                const double du = s(0) / s(2) - 0.5;
                const double dv = s(1) / s(2) - 0.5;
                const double d2 = du * du + dv * dv;
                if (d2 > support * support) continue;
                out.at(y, x) = std::max(out.at(y, x), peak * std::exp(-d2 / (2.0 * sigma2)));
            }
    }
    return out;
}

nn::Var HeatmapProvider::score(const nn::Var& images) const {
    const nn::Shape s = images.shape();
    std::vector<RegionHeatmap> maps;
    for (int n = 0; n < s.n; ++n) maps.push_back(heatmap(image_from_tensor(images.value(), n)));
    return nn::Var::constant(map_to_tensor<RegionTag>(maps));
}

RegionHeatmap GaussianBoxProvider::heatmap(const ImageTensor& img) const {
    return gaussian_box_heatmap(boxes_, img.height(), img.width(), peak_);
}

RegionHeatmap FileHeatmapProvider::heatmap(const ImageTensor& img) const {
    const ImageTensor loaded = read_image(path_, ImageReadMode::Gray);
    const int want_h = img.height() / downscale_;
    const int want_w = img.width() / downscale_;
    require(loaded.height() == want_h && loaded.width() == want_w, ErrorCode::ProviderContract,
            "heatmap file " + path_.string() + " is " + std::to_string(loaded.height()) + "x" +
                std::to_string(loaded.width()) + ", expected " + std::to_string(want_h) + "x" +
                std::to_string(want_w));
    return map_from_image<RegionHeatmap>(loaded);
}

} // namespace darktext
