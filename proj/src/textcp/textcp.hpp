#pragma once

#include "dataset/dataset.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace darktext::textcp {

using Rng = std::mt19937_64;

struct TextCpParams {
    int n_target = 10;          // text instances wanted per image
    double gamma = 1.0;         // minimum width / height of a pasted box
    int max_attempts = 100;     // loop iterations per image
    data::BoxStats stats;       // supplies the size distribution
    std::uint64_t rng_seed = 0;
};

// A legible text crop available for pasting.
struct PoolEntry {
    std::string source_id;
    int box_index = 0;
    TextBox box;
    ImageTensor long_crop;
    ImageTensor short_crop;     // same window of the paired short exposure
};

struct TextPool {
    std::vector<PoolEntry> entries;
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

// All legible boxes of the corpus with their pixel crops.
TextPool build_pool(const std::vector<data::SamplePair>& pairs);

// Raw draw: u ~ U(0, W), v ~ U(0, H), w ~ N(mu_W, sigma_W^2), h ~ N(mu_H, sigma_H^2).
struct Placement {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double h = 0.0;
};

Placement sample_placement(const TextCpParams& params, int image_w, int image_h, Rng& rng);

using PlacementSampler = std::function<Placement(Rng&)>;

struct AugmentResult {
    ImageTensor image;
    ImageTensor short_image;    // empty unless a paired short exposure was given
    std::vector<TextBox> boxes; // existing boxes followed by pasted ones
    int attempts = 0;
    int pasted = 0;
};

struct AugmentInputs {
    const ImageTensor* paired_short = nullptr;  // pastes the pool's short crops at the same spots
    std::string image_id;                       // pool entries from this image are skipped
    PlacementSampler sampler;                   // defaults to sample_placement
};

// Pastes pool crops at dataset-aware random placements until the image holds
// `n_target` boxes or `max_attempts` iterations pass. A placement is snapped
// to whole pixels (floor position, rounded size) and accepted only when
// w / h >= gamma, it lies inside the image and its aabb has zero-area
// intersection with every current box. Partial augmentation is not an error.
AugmentResult text_cp_augment(const ImageTensor& image, const std::vector<TextBox>& existing,
                              const TextPool& pool, const TextCpParams& params,
                              const AugmentInputs& inputs = {});

} // namespace darktext::textcp
