#include "dataset/dataset.hpp"

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "dataset/icdar.hpp"

#include <algorithm>
#include <cmath>

namespace darktext::data {

std::vector<TextBox> clamp_boxes_to_image(const std::vector<TextBox>& boxes, int height, int width) {
    std::vector<TextBox> out;
    out.reserve(boxes.size());
    for (TextBox b : boxes) {
        auto quad = b.quad();
        for (auto& p : quad) {
            p.x = std::clamp(p.x, 0.0, static_cast<double>(width));
            p.y = std::clamp(p.y, 0.0, static_cast<double>(height));
        }
        b.set_quad(quad);
        const Rect r = b.aabb();
        if (r.w > 0.0 && r.h > 0.0) out.push_back(std::move(b));
    }
    return out;
}

SamplePair load_pair(const std::filesystem::path& short_path, const std::filesystem::path& long_path,
                     const std::filesystem::path& annotation_path, const LoadOptions& options, std::string id) {
    SamplePair pair;
    pair.short_exposure = read_image(short_path);
    pair.long_exposure = read_image(long_path);
    if (!pair.short_exposure.same_size(pair.long_exposure)) {
        fail(ErrorCode::Data, "dimension mismatch: " + short_path.string() + " is " +
                                  std::to_string(pair.short_exposure.width()) + "x" +
                                  std::to_string(pair.short_exposure.height()) + " but " + long_path.string() +
                                  " is " + std::to_string(pair.long_exposure.width()) + "x" +
                                  std::to_string(pair.long_exposure.height()));
    }
    if (annotation_path.empty() || !std::filesystem::exists(annotation_path)) {
        require(options.allow_unlabeled, ErrorCode::Io,
                "annotation file " + annotation_path.string() + " not found (set allow_unlabeled to accept)");
    } else {
        pair.boxes = clamp_boxes_to_image(read_icdar_file(annotation_path), pair.long_exposure.height(),
                                          pair.long_exposure.width());
    }
    pair.id = id.empty() ? long_path.stem().string() : std::move(id);
    return pair;
}

BoxStats compute_box_stats(const std::vector<TextBox>& boxes, bool legible_only) {
    BoxStats stats;
    double mean_w = 0.0, mean_h = 0.0, m2_w = 0.0, m2_h = 0.0;
    long n = 0;
    for (const auto& b : boxes) {
        b.legible() ? ++stats.count_legible : ++stats.count_illegible;
        if (legible_only && !b.legible()) continue;
        const Rect r = b.aabb();
        ++n;
        const double dw = r.w - mean_w;
        mean_w += dw / n;
        m2_w += dw * (r.w - mean_w);
        const double dh = r.h - mean_h;
        mean_h += dh / n;
        m2_h += dh * (r.h - mean_h);
    }
    require(n > 0, ErrorCode::EmptyCorpus, "no text boxes to compute statistics from");
    stats.mu_w = mean_w;
    stats.mu_h = mean_h;
    stats.sigma_w = std::sqrt(std::max(0.0, m2_w / n));
    stats.sigma_h = std::sqrt(std::max(0.0, m2_h / n));
    return stats;
}

BoxStats compute_box_stats(const std::vector<SamplePair>& pairs, bool legible_only) {
    std::vector<TextBox> all;
    for (const auto& p : pairs) all.insert(all.end(), p.boxes.begin(), p.boxes.end());
    return compute_box_stats(all, legible_only);
}

} // namespace darktext::data
