#pragma once

#include "core/geometry.hpp"
#include "core/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace darktext::data {

// A short-exposure (dark) capture, its long-exposure reference and the text
// boxes annotated on the reference.
struct SamplePair {
    ImageTensor short_exposure;
    ImageTensor long_exposure;
    std::vector<TextBox> boxes;
    std::string id;
};

struct LoadOptions {
    bool allow_unlabeled = false;   // missing annotation file -> no boxes
};

SamplePair load_pair(const std::filesystem::path& short_path, const std::filesystem::path& long_path,
                     const std::filesystem::path& annotation_path, const LoadOptions& options = {},
                     std::string id = {});

// Corners outside [0, W] x [0, H] are clamped onto the border; boxes that
// collapse to zero width or height are dropped.
std::vector<TextBox> clamp_boxes_to_image(const std::vector<TextBox>& boxes, int height, int width);

struct BoxStats {
    double mu_w = 0.0;
    double mu_h = 0.0;
    double sigma_w = 0.0;   // population standard deviation
    double sigma_h = 0.0;
    long count_legible = 0;
    long count_illegible = 0;
};

// Mean / population std of aabb widths and heights, single pass (Welford).
BoxStats compute_box_stats(const std::vector<SamplePair>& pairs, bool legible_only = true);
BoxStats compute_box_stats(const std::vector<TextBox>& boxes, bool legible_only = true);

} // namespace darktext::data
