#include "core/image.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace darktext {

namespace {

void check_dims(int height, int width, int channels) {
    require(height >= 1 && width >= 1, ErrorCode::InvalidArgument,
            "image dimensions must be positive, got " + std::to_string(height) + "x" + std::to_string(width));
    require(channels == 1 || channels == 3, ErrorCode::InvalidArgument,
            "image must have 1 or 3 channels, got " + std::to_string(channels));
}

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

} // namespace

ImageTensor::ImageTensor(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
    check_dims(height, width, channels);
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageTensor::ImageTensor(int height, int width, int channels, std::vector<double> values)
    : height_(height), width_(width), channels_(channels), data_(std::move(values)) {
    check_dims(height, width, channels);
    require(data_.size() == static_cast<std::size_t>(height) * width * channels, ErrorCode::Shape,
            "image buffer size does not match dimensions");
}

double ImageTensor::mean() const {
    if (data_.empty()) return 0.0;
    return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

void ImageTensor::validate() const {
    for (double v : data_) {
        require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorCode::Data,
                "image value " + std::to_string(v) + " outside [0, 1]");
    }
}

void ImageTensor::clamp_unit() {
    for (double& v : data_) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
}

ImageTensor to_gray(const ImageTensor& img) {
    if (img.channels() == 1) return img;
    ImageTensor out(img.height(), img.width(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(y, x) = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
    return out;
}

ImageTensor resize_bilinear(const ImageTensor& img, int height, int width) {
    ImageTensor out(height, width, img.channels());
    const auto ty = nn::bilinear_taps(img.height(), height);
    const auto tx = nn::bilinear_taps(img.width(), width);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < img.channels(); ++c) {
                const auto& ry = ty[y];
                const auto& rx = tx[x];
                out.at(y, x, c) = ry.w0 * (rx.w0 * img.at(ry.i0, rx.i0, c) + rx.w1 * img.at(ry.i0, rx.i1, c)) +
                                  ry.w1 * (rx.w0 * img.at(ry.i1, rx.i0, c) + rx.w1 * img.at(ry.i1, rx.i1, c));
            }
    return out;
}

ImageTensor crop(const ImageTensor& img, int y0, int x0, int height, int width) {
    require(y0 >= 0 && x0 >= 0 && y0 + height <= img.height() && x0 + width <= img.width(), ErrorCode::Shape,
            "crop window exceeds image bounds");
    ImageTensor out(height, width, img.channels());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
    return out;
}

ImageTensor reflect_pad(const ImageTensor& img, int height, int width) {
    require(height >= img.height() && width >= img.width(), ErrorCode::Shape,
            "reflect_pad target smaller than image");
    ImageTensor out(height, width, img.channels());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(y, x, c) = img.at(reflect_index(y, img.height()), reflect_index(x, img.width()), c);
    return out;
}

nn::Tensor to_tensor(std::span<const ImageTensor> batch) {
    require(!batch.empty(), ErrorCode::Shape, "empty image batch");
    const ImageTensor& first = batch.front();
    nn::Tensor t(nn::Shape{static_cast<int>(batch.size()), first.channels(), first.height(), first.width()});
    for (std::size_t n = 0; n < batch.size(); ++n) {
        const ImageTensor& img = batch[n];
        require(img.same_size(first) && img.channels() == first.channels(), ErrorCode::Shape,
                "image batch members differ in size");
        for (int c = 0; c < img.channels(); ++c)
            for (int y = 0; y < img.height(); ++y)
                for (int x = 0; x < img.width(); ++x) t.at(static_cast<int>(n), c, y, x) = img.at(y, x, c);
    }
    return t;
}

nn::Tensor to_tensor(const ImageTensor& img) { return to_tensor(std::span<const ImageTensor>(&img, 1)); }

ImageTensor image_from_tensor(const nn::Tensor& t, int n) {
    const auto& s = t.shape();
    ImageTensor out(s.h, s.w, s.c);
    for (int c = 0; c < s.c; ++c)
        for (int y = 0; y < s.h; ++y)
            for (int x = 0; x < s.w; ++x) out.at(y, x, c) = t.at(n, c, y, x);
    return out;
}

} // namespace darktext
