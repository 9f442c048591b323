#include "core/color.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>

namespace darktext {

namespace {

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace

ImageTensor rgb_to_lightness(const ImageTensor& img) {
    require(img.channels() == 3, ErrorCode::InvalidArgument,
            "rgb_to_lightness expects 3 channels, got " + std::to_string(img.channels()));
    ImageTensor out(img.height(), img.width(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            // relative luminance; the D65 white point has Y_n = 1
            const double lum = 0.2126729 * srgb_to_linear(img.at(y, x, 0)) +
                               0.7151522 * srgb_to_linear(img.at(y, x, 1)) +
                               0.0721750 * srgb_to_linear(img.at(y, x, 2));
            const double l_star = 116.0 * lab_f(lum) - 16.0;
            out.at(y, x) = std::clamp(l_star / 100.0, 0.0, 1.0);
        }
    return out;
}

double mean_lightness(const ImageTensor& img) { return rgb_to_lightness(img).mean(); }

} // namespace darktext
