#include "metrics/detection.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

namespace darktext::metrics {

MatchResult match_detections(const std::vector<TextBox>& preds, const std::vector<TextBox>& gts,
                             double iou_threshold, IouMode mode) {
    require(iou_threshold > 0.0 && iou_threshold < 1.0, ErrorCode::InvalidArgument,
            "IoU threshold must lie in (0, 1)");
    MatchResult r;
    r.pred_to_gt.assign(preds.size(), -1);
    r.pred_excluded.assign(preds.size(), false);
    r.gt_matched.assign(gts.size(), false);

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        double best = -1.0;
        std::size_t best_gt = 0;
        std::vector<double> ious(gts.size());
        for (std::size_t g = 0; g < gts.size(); ++g) {
            ious[g] = box_iou(preds[p], gts[g], mode);
            if (ious[g] > best) {
                best = ious[g];
                best_gt = g;
            }
        }
        if (!gts.empty() && !gts[best_gt].legible() && best >= iou_threshold) {
            r.pred_excluded[p] = true;
            ++r.excluded;
            continue;
        }
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gts[g].legible() && ious[g] > iou_threshold) candidates.emplace_back(ious[g], p, g);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    for (const auto& [iou, p, g] : candidates) {
        if (r.pred_to_gt[p] >= 0 || r.gt_matched[g]) continue;
        r.pred_to_gt[p] = static_cast<int>(g);
        r.gt_matched[g] = true;
        ++r.tp;
    }
    r.fp = static_cast<int>(preds.size()) - r.excluded - r.tp;
    return r;
}

DetectionScores hmean(int tp, int fp, int total_legible_gt) {
    require(tp >= 0 && fp >= 0 && total_legible_gt >= 0, ErrorCode::InvalidArgument,
            "detection counts must be non-negative");
    DetectionScores s;
    if (tp + fp > 0) s.precision = static_cast<double>(tp) / (tp + fp);
    else s.precision = total_legible_gt == 0 ? 1.0 : 0.0;
    s.recall = total_legible_gt > 0 ? static_cast<double>(tp) / total_legible_gt : 1.0;
    const double denom = s.precision + s.recall;
    s.hmean = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    return s;
}

void DetectionTally::add(const MatchResult& match, const std::vector<TextBox>& gts) {
    tp += match.tp;
    fp += match.fp;
    legible_gt += static_cast<int>(std::count_if(gts.begin(), gts.end(), [](const TextBox& b) { return b.legible(); }));
}

std::string ascii_fold(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

int count_correct_words(const std::vector<RecognitionRecord>& records, IouMode mode) {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [mode](const RecognitionRecord& r) {
        return box_iou(r.pred_box, r.gt_box, mode) > 0.5 && ascii_fold(r.pred_text) == ascii_fold(r.gt_text);
    }));
}

double word_accuracy(const std::vector<RecognitionRecord>& records, int legible_gt_words, IouMode mode) {
    require(legible_gt_words >= 0, ErrorCode::InvalidArgument, "word count must be non-negative");
    if (legible_gt_words == 0) return 1.0;
    return static_cast<double>(count_correct_words(records, mode)) / legible_gt_words;
}

std::vector<RecognitionRecord> pair_recognitions(const std::vector<TextBox>& preds,
                                                 const std::vector<TextBox>& gts, IouMode mode) {
    const MatchResult m = match_detections(preds, gts, 0.5, mode);
    std::vector<RecognitionRecord> records;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (m.pred_to_gt[p] < 0) continue;
        const TextBox& gt = gts[m.pred_to_gt[p]];
        records.push_back({preds[p], preds[p].transcription(), gt, gt.transcription()});
    }
    return records;
}

} // namespace darktext::metrics
