#pragma once

#include "core/geometry.hpp"

#include <string>
#include <vector>

namespace darktext::metrics {

struct MatchResult {
    int tp = 0;
    int fp = 0;
    int excluded = 0;                 // predictions absorbed by don't-care boxes
    std::vector<int> pred_to_gt;      // matched GT index or -1
    std::vector<bool> pred_excluded;
    std::vector<bool> gt_matched;
};

// IC15-style matching. A prediction whose highest-IoU ground truth is a
// don't-care box with IoU >= threshold is excluded. The rest are matched
// one-to-one to legible boxes greedily by descending IoU, requiring
// IoU > threshold.
MatchResult match_detections(const std::vector<TextBox>& preds, const std::vector<TextBox>& gts,
                             double iou_threshold = 0.5, IouMode mode = IouMode::AxisAligned);

struct DetectionScores {
    double precision = 0.0;
    double recall = 0.0;
    double hmean = 0.0;
};

// Precision is 1 when there are no predictions and no ground truth, 0 when
// there are no predictions but some ground truth. Recall is 1 without ground
// truth. H-Mean is 0 when P + R = 0.
DetectionScores hmean(int tp, int fp, int total_legible_gt);

// Micro-averaged detection counts over a test set.
struct DetectionTally {
    int tp = 0;
    int fp = 0;
    int legible_gt = 0;

    void add(const MatchResult& match, const std::vector<TextBox>& gts);
    DetectionScores scores() const { return hmean(tp, fp, legible_gt); }
};

struct RecognitionRecord {
    TextBox pred_box;
    std::string pred_text;
    TextBox gt_box;
    std::string gt_text;
};

// Records with IoU > 0.5 and ASCII case-insensitive equal text.
int count_correct_words(const std::vector<RecognitionRecord>& records, IouMode mode = IouMode::AxisAligned);

// Correct records over the legible ground-truth word count; 1 when that count is zero.
double word_accuracy(const std::vector<RecognitionRecord>& records, int legible_gt_words,
                     IouMode mode = IouMode::AxisAligned);

// Pairs recognised boxes with ground truth by the detection matcher and
// builds the records word_accuracy consumes.
std::vector<RecognitionRecord> pair_recognitions(const std::vector<TextBox>& preds,
                                                 const std::vector<TextBox>& gts, IouMode mode = IouMode::AxisAligned);

std::string ascii_fold(std::string s);

} // namespace darktext::metrics
