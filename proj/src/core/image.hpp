#pragma once

#include "nn/tensor.hpp"

#include <span>
#include <vector>

namespace darktext {

// H x W x C unit-interval intensities, channel-last, C in {1, 3}.
class ImageTensor {
public:
    ImageTensor() = default;
    ImageTensor(int height, int width, int channels, double fill = 0.0);
    ImageTensor(int height, int width, int channels, std::vector<double> values);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    double& at(int y, int x, int c = 0) { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
    double at(int y, int x, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    double mean() const;

    bool same_size(const ImageTensor& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }
    bool operator==(const ImageTensor&) const = default;

    // Throws when any value leaves [0, 1] or is not finite.
    void validate() const;
    void clamp_unit();

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// Single-channel unit-interval map. The tag keeps edge maps and text-region
// heatmaps from being passed for one another.
template <class Tag>
class UnitMap {
public:
    UnitMap() = default;
    UnitMap(int height, int width, double fill = 0.0)
        : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width, fill) {}

    int height() const { return height_; }
    int width() const { return width_; }
    double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    bool operator==(const UnitMap&) const = default;

    double max() const {
        double m = 0.0;
        for (double v : data_) m = v > m ? v : m;
        return m;
    }

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

struct EdgeTag {};
struct RegionTag {};
using EdgeMap = UnitMap<EdgeTag>;
using RegionHeatmap = UnitMap<RegionTag>;

template <class Tag>
ImageTensor as_image(const UnitMap<Tag>& map) {
    ImageTensor out(map.height(), map.width(), 1);
    auto src = map.values();
    auto dst = out.values();
    std::copy(src.begin(), src.end(), dst.begin());
    return out;
}

template <class Map>
Map map_from_image(const ImageTensor& img) {
    Map out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.at(y, x) = img.at(y, x, 0);
    return out;
}

// Rec.601 luma for 3-channel input; identity copy for 1-channel input.
ImageTensor to_gray(const ImageTensor& img);

// Bilinear resize with half-pixel centres.
ImageTensor resize_bilinear(const ImageTensor& img, int height, int width);

ImageTensor crop(const ImageTensor& img, int y0, int x0, int height, int width);

// Reflect padding (edge pixel not repeated) to the given size.
ImageTensor reflect_pad(const ImageTensor& img, int height, int width);

// Conversions to the network layout [N, C, H, W].
nn::Tensor to_tensor(std::span<const ImageTensor> batch);
nn::Tensor to_tensor(const ImageTensor& img);
ImageTensor image_from_tensor(const nn::Tensor& t, int n = 0);

template <class Tag>
nn::Tensor map_to_tensor(std::span<const UnitMap<Tag>> batch) {
    const int h = batch.front().height();
    const int w = batch.front().width();
    nn::Tensor t(nn::Shape{static_cast<int>(batch.size()), 1, h, w});
    for (std::size_t n = 0; n < batch.size(); ++n) {
        auto v = batch[n].values();
        std::copy(v.begin(), v.end(), t.data() + n * static_cast<std::size_t>(h) * w);
    }
    return t;
}

template <class Map>
Map map_from_tensor(const nn::Tensor& t, int n = 0, int c = 0) {
    Map out(t.shape().h, t.shape().w);
    for (int y = 0; y < t.shape().h; ++y)
        for (int x = 0; x < t.shape().w; ++x) out.at(y, x) = t.at(n, c, y, x);
    return out;
}

} // namespace darktext
