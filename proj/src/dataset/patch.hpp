#pragma once

#include "dataset/dataset.hpp"

#include <cstdint>

namespace darktext::data {

struct PatchSpec {
    int size = 512;
    bool require_legible_text = true;
    bool random_flip = true;        // independent horizontal and vertical flips
    bool random_transpose = true;
    // Boxes cut by the window survive when at least this fraction of their
    // aabb area stays inside; otherwise they are dropped, or kept as
    // don't-care when `dropped_to_dont_care` is set.
    double keep_fraction = 0.5;
    bool dropped_to_dont_care = false;
    int max_draws = 100;
};

// Where a patch came from and how it was reoriented: crop at (x0, y0), then
// optional horizontal flip, vertical flip and transpose, in that order.
struct PatchWindow {
    int x0 = 0;
    int y0 = 0;
    int size = 0;
    bool hflip = false;
    bool vflip = false;
    bool transpose = false;
};

struct PatchSample {
    ImageTensor short_patch;
    ImageTensor long_patch;
    std::vector<TextBox> boxes;
    PatchWindow window;
};

PatchSample sample_patch(const SamplePair& pair, const PatchSpec& spec, std::uint64_t seed);

ImageTensor apply_window(const ImageTensor& img, const PatchWindow& window);

template <class Tag>
UnitMap<Tag> apply_window(const UnitMap<Tag>& map, const PatchWindow& window) {
    return map_from_image<UnitMap<Tag>>(apply_window(as_image(map), window));
}

// Boxes in patch coordinates after clipping rules; see PatchSpec.
std::vector<TextBox> apply_window(const std::vector<TextBox>& boxes, const PatchWindow& window,
                                  const PatchSpec& spec);

} // namespace darktext::data
