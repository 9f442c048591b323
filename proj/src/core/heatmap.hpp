#pragma once

#include "core/geometry.hpp"
#include "core/image.hpp"
#include "nn/autograd.hpp"

#include <filesystem>
#include <vector>

namespace darktext {

// Spread of the canonical Gaussian in unit-square box coordinates; the
// heatmap is truncated at three of these from the box centre.
inline constexpr double kBoxGaussianSigma = 0.25;

// One isotropic Gaussian per legible box, drawn in the box's unit square and
// warped into its quad by the square->quad homography, composited with max.
// Pixel (x, y) is sampled at integer coordinates.
RegionHeatmap gaussian_box_heatmap(const std::vector<TextBox>& boxes, int height, int width, double peak);

// Maps an image to a text-region score map of size (H / s, W / s) with
// s = downscale().
class HeatmapProvider {
public:
    virtual ~HeatmapProvider() = default;

    virtual RegionHeatmap heatmap(const ImageTensor& img) const = 0;
    virtual int downscale() const { return 1; }

    // Scores a [N, C, H, W] batch inside the autograd graph. The default wraps
    // heatmap() as a constant, i.e. no gradient reaches the images.
    virtual nn::Var score(const nn::Var& images) const;
    virtual bool differentiable() const { return false; }
};

// Annotation-driven provider: ignores pixel content.
class GaussianBoxProvider final : public HeatmapProvider {
public:
    GaussianBoxProvider(std::vector<TextBox> boxes, double peak = 1.0)
        : boxes_(std::move(boxes)), peak_(peak) {}
    RegionHeatmap heatmap(const ImageTensor& img) const override;

private:
    std::vector<TextBox> boxes_;
    double peak_;
};

// Loads a precomputed single-channel heatmap (e.g. detector output produced
// offline) and checks it against the declared downscale factor.
class FileHeatmapProvider final : public HeatmapProvider {
public:
    explicit FileHeatmapProvider(std::filesystem::path path, int downscale = 1)
        : path_(std::move(path)), downscale_(downscale) {}
    RegionHeatmap heatmap(const ImageTensor& img) const override;
    int downscale() const override { return downscale_; }

private:
    std::filesystem::path path_;
    int downscale_;
};

} // namespace darktext
