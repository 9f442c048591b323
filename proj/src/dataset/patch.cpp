#include "dataset/patch.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace darktext::data {

namespace {

Point transform_point(Point p, const PatchWindow& w) {
    p.x -= w.x0;
    p.y -= w.y0;
    const double s = w.size;
    if (w.hflip) p.x = s - p.x;
    if (w.vflip) p.y = s - p.y;
    if (w.transpose) std::swap(p.x, p.y);
    return p;
}

} // namespace

ImageTensor apply_window(const ImageTensor& img, const PatchWindow& window) {
    const int s = window.size;
    require(window.x0 >= 0 && window.y0 >= 0 && window.x0 + s <= img.width() && window.y0 + s <= img.height(),
            ErrorCode::Shape, "patch window exceeds image bounds");
    ImageTensor out(s, s, img.channels());
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            // (x, y) in the output; invert transpose, then the flips
            int sx = window.transpose ? y : x;
            int sy = window.transpose ? x : y;
            if (window.hflip) sx = s - 1 - sx;
            if (window.vflip) sy = s - 1 - sy;
            for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(window.y0 + sy, window.x0 + sx, c);
        }
    return out;
}

std::vector<TextBox> apply_window(const std::vector<TextBox>& boxes, const PatchWindow& window,
                                  const PatchSpec& spec) {
    const Rect win{static_cast<double>(window.x0), static_cast<double>(window.y0),
                   static_cast<double>(window.size), static_cast<double>(window.size)};
    std::vector<TextBox> out;
    for (const auto& box : boxes) {
        const Rect r = box.aabb();
        const double inside = intersection_area(r, win);
        if (inside <= 0.0) continue;
        const bool keep = inside >= spec.keep_fraction * r.area();
        if (!keep && !spec.dropped_to_dont_care) continue;
        std::array<Point, 4> quad = box.quad();
        for (auto& p : quad) {
            p.x = std::clamp(p.x, win.u, win.right());
            p.y = std::clamp(p.y, win.v, win.bottom());
            p = transform_point(p, window);
        }
        TextBox moved(canonical_quad(quad), box.legible(), box.transcription());
        if (!keep) moved.set_legible(false);
        const Rect mr = moved.aabb();
        if (mr.w > 0.0 && mr.h > 0.0) out.push_back(std::move(moved));
    }
    return out;
}

PatchSample sample_patch(const SamplePair& pair, const PatchSpec& spec, std::uint64_t seed) {
    const int width = pair.long_exposure.width();
    const int height = pair.long_exposure.height();
    require(spec.size >= 1, ErrorCode::InvalidArgument, "patch size must be positive");
    require(width >= spec.size && height >= spec.size, ErrorCode::Shape,
            "sample '" + pair.id + "' is " + std::to_string(width) + "x" + std::to_string(height) +
                ", smaller than the " + std::to_string(spec.size) + " px patch");
    require(pair.short_exposure.same_size(pair.long_exposure), ErrorCode::Data,
            "sample '" + pair.id + "' has mismatched exposures");

    std::mt19937_64 rng(seed);
    PatchWindow window;
    window.size = spec.size;

    std::vector<const TextBox*> anchors;
    for (const auto& b : pair.boxes) {
        if (b.legible()) anchors.push_back(&b);
    }

    if (spec.require_legible_text) {
        bool placed = false;
        for (int draw = 0; draw < spec.max_draws && !anchors.empty(); ++draw) {
            std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
            const Rect r = anchors[pick(rng)]->aabb();
            // window [x0, x0 + size) must contain [u, u + w]
            const int lo_x = std::max(0, static_cast<int>(std::ceil(r.right())) - spec.size);
            const int hi_x = std::min(width - spec.size, static_cast<int>(std::floor(r.u)));
            const int lo_y = std::max(0, static_cast<int>(std::ceil(r.bottom())) - spec.size);
            const int hi_y = std::min(height - spec.size, static_cast<int>(std::floor(r.v)));
            if (lo_x > hi_x || lo_y > hi_y) continue;
            window.x0 = std::uniform_int_distribution<int>(lo_x, hi_x)(rng);
            window.y0 = std::uniform_int_distribution<int>(lo_y, hi_y)(rng);
            placed = true;
            break;
        }
        require(placed, ErrorCode::SamplingExhausted,
                "no legible text box of sample '" + pair.id + "' fits a " + std::to_string(spec.size) +
                    " px patch after " + std::to_string(spec.max_draws) + " draws");
    } else {
        window.x0 = std::uniform_int_distribution<int>(0, width - spec.size)(rng);
        window.y0 = std::uniform_int_distribution<int>(0, height - spec.size)(rng);
    }

    std::bernoulli_distribution coin(0.5);
    if (spec.random_flip) {
        window.hflip = coin(rng);
        window.vflip = coin(rng);
    }
    if (spec.random_transpose) window.transpose = coin(rng);

    PatchSample out;
    out.window = window;
    out.short_patch = apply_window(pair.short_exposure, window);
    out.long_patch = apply_window(pair.long_exposure, window);
    out.boxes = apply_window(pair.boxes, window, spec);
    return out;
}

} // namespace darktext::data
