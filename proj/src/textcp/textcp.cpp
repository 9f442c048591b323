#include "textcp/textcp.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>

namespace darktext::textcp {

namespace {

ImageTensor crop_rect(const ImageTensor& img, const Rect& r) {
    const int x0 = std::clamp(static_cast<int>(std::floor(r.u)), 0, img.width() - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(r.v)), 0, img.height() - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(r.right())), x0 + 1, img.width());
    const int y1 = std::clamp(static_cast<int>(std::ceil(r.bottom())), y0 + 1, img.height());
    return crop(img, y0, x0, y1 - y0, x1 - x0);
}

void paste(ImageTensor& dst, const ImageTensor& src, int u, int v, int w, int h) {
    const ImageTensor resized = resize_bilinear(src, h, w);
    const int channels = std::min(dst.channels(), resized.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < dst.channels(); ++c)
                dst.at(v + y, u + x, c) = resized.at(y, x, c < channels ? c : 0);
}

} // namespace

TextPool build_pool(const std::vector<data::SamplePair>& pairs) {
    TextPool pool;
    for (const auto& pair : pairs) {
        for (std::size_t i = 0; i < pair.boxes.size(); ++i) {
            const TextBox& box = pair.boxes[i];
            if (!box.legible()) continue;
            PoolEntry e;
            e.source_id = pair.id;
            e.box_index = static_cast<int>(i);
            e.box = box;
            e.long_crop = crop_rect(pair.long_exposure, box.aabb());
            if (!pair.short_exposure.empty()) e.short_crop = crop_rect(pair.short_exposure, box.aabb());
            pool.entries.push_back(std::move(e));
        }
    }
    return pool;
}

Placement sample_placement(const TextCpParams& params, int image_w, int image_h, Rng& rng) {
    Placement p;
    p.u = std::uniform_real_distribution<double>(0.0, image_w)(rng);
    p.v = std::uniform_real_distribution<double>(0.0, image_h)(rng);
    const auto& s = params.stats;
    p.w = s.sigma_w > 0.0 ? std::normal_distribution<double>(s.mu_w, s.sigma_w)(rng) : s.mu_w;
    p.h = s.sigma_h > 0.0 ? std::normal_distribution<double>(s.mu_h, s.sigma_h)(rng) : s.mu_h;
    return p;
}

AugmentResult text_cp_augment(const ImageTensor& image, const std::vector<TextBox>& existing,
                              const TextPool& pool, const TextCpParams& params, const AugmentInputs& inputs) {
    require(params.n_target >= 0 && params.gamma > 0.0 && params.max_attempts >= 1, ErrorCode::Config,
            "Text-CP needs n_target >= 0, gamma > 0 and max_attempts >= 1");
    AugmentResult result;
    result.image = image;
    result.boxes = existing;
    const bool paired = inputs.paired_short != nullptr;
    if (paired) {
        require(inputs.paired_short->same_size(image), ErrorCode::Shape,
                "paired short exposure differs in size from the augmented image");
        result.short_image = *inputs.paired_short;
    }
    if (static_cast<int>(result.boxes.size()) >= params.n_target) return result;
    require(!pool.empty(), ErrorCode::Config, "Text-CP pool is empty but more text instances were requested");

    Rng rng(params.rng_seed);
    const int W = image.width();
    const int H = image.height();
    std::vector<bool> used(pool.size(), false);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!inputs.image_id.empty() && pool.entries[i].source_id == inputs.image_id) used[i] = true;
    }

    while (static_cast<int>(result.boxes.size()) < params.n_target && result.attempts < params.max_attempts) {
        ++result.attempts;
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (!used[i]) candidates.push_back(i);
        }
        if (candidates.empty()) break;
        const std::size_t pick =
            candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
        const Placement raw = inputs.sampler ? inputs.sampler(rng) : sample_placement(params, W, H, rng);

        const int u = static_cast<int>(std::floor(raw.u));
        const int v = static_cast<int>(std::floor(raw.v));
        const long w = std::lround(raw.w);
        const long h = std::lround(raw.h);
        if (w < 1 || h < 1 || u < 0 || v < 0) continue;
        if (static_cast<double>(w) / static_cast<double>(h) < params.gamma) continue;
        if (u + w > W || v + h > H) continue;
        const Rect placed{static_cast<double>(u), static_cast<double>(v), static_cast<double>(w),
                          static_cast<double>(h)};
        const bool overlaps = std::any_of(result.boxes.begin(), result.boxes.end(), [&](const TextBox& b) {
            return intersection_area(b.aabb(), placed) > 0.0;
        });
        if (overlaps) continue;

        const PoolEntry& entry = pool.entries[pick];
        paste(result.image, entry.long_crop, u, v, static_cast<int>(w), static_cast<int>(h));
        if (paired && !entry.short_crop.empty()) {
            paste(result.short_image, entry.short_crop, u, v, static_cast<int>(w), static_cast<int>(h));
        }
        result.boxes.push_back(TextBox::from_rect(placed, true, entry.box.transcription()));
        used[pick] = true;
        ++result.pasted;
    }
    return result;
}

} // namespace darktext::textcp
