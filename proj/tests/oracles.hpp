#pragma once

// Independent reference implementations used by the metrics suite and the
// acceptance binary. They share no code with the library beyond basic types.

#include "core/geometry.hpp"
#include "core/image.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using darktext::ImageTensor;
using darktext::Rect;
using darktext::TextBox;

inline double mse(const ImageTensor& a, const ImageTensor& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) s += std::pow(a.values()[i] - b.values()[i], 2);
    return s / a.values().size();
}

// Full 2-D Gaussian window evaluated at every valid position.
inline double ssim(const ImageTensor& a, const ImageTensor& b) {
    const int win = 11;
    const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
    std::vector<double> g(win * win);
    double gs = 0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j)
            gs += g[i * win + j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
    for (double& v : g) v /= gs;
    double total = 0;
    int count = 0;
    for (int c = 0; c < a.channels(); ++c)
        for (int y = 0; y + win <= a.height(); ++y)
            for (int x = 0; x + win <= a.width(); ++x) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                for (int i = 0; i < win; ++i)
                    for (int j = 0; j < win; ++j) {
                        const double w = g[i * win + j], va = a.at(y + i, x + j, c), vb = b.at(y + i, x + j, c);
                        ma += w * va, mb += w * vb, saa += w * va * va, sbb += w * vb * vb, sab += w * va * vb;
                    }
                const double cov = sab - ma * mb;
                total += (2 * ma * mb + c1) * (2 * cov + c2) /
                         ((ma * ma + mb * mb + c1) * (saa - ma * ma + sbb - mb * mb + c2));
                ++count;
            }
    return total / count;
}

inline double box_overlap(const Rect& a, const Rect& b) {
    const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.u, b.u));
    const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.v, b.v));
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

// Exhaustive search over every one-to-one assignment of the non-excluded
// predictions to legible ground truth with IoU > 0.5; returns the largest
// number of matched pairs.
inline int exhaustive_tp(const std::vector<TextBox>& preds, const std::vector<TextBox>& gts) {
    std::vector<int> active;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        double best = 0.0;
        int best_gt = -1;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double iou = box_overlap(preds[p].aabb(), gts[g].aabb());
            if (iou > best) best = iou, best_gt = int(g);
        }
        if (best_gt >= 0 && !gts[best_gt].legible() && best >= 0.5) continue;
        active.push_back(int(p));
    }
    std::vector<bool> taken(gts.size(), false);
    std::function<int(std::size_t)> search = [&](std::size_t k) -> int {
        if (k == active.size()) return 0;
        int best = search(k + 1);   // leave this prediction unmatched
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (taken[g] || !gts[g].legible()) continue;
            if (box_overlap(preds[active[k]].aabb(), gts[g].aabb()) <= 0.5) continue;
            taken[g] = true;
            best = std::max(best, 1 + search(k + 1));
            taken[g] = false;
        }
        return best;
    };
    return search(0);
}

inline TextBox rect_box(double u, double v, double w, double h, bool legible = true, std::string text = "x") {
    return TextBox::from_rect({u, v, w, h}, legible, legible ? std::move(text) : std::string{});
}

// Up to five ground-truth boxes and five predictions in a 90x90 frame.
// Predictions are mostly jittered copies of a ground-truth box. With
// `disjoint_gt` the annotated words never overlap one another.
template <class Rng>
void random_instance(Rng& rng, bool disjoint_gt, std::vector<TextBox>& preds, std::vector<TextBox>& gts) {
    std::uniform_real_distribution<double> pos(0, 60), size(8, 30), jitter(-4, 4);
    std::uniform_int_distribution<int> count(0, 5);
    gts.clear();
    preds.clear();
    const int ng = count(rng), np = count(rng);
    while (int(gts.size()) < ng) {
        const TextBox g = rect_box(pos(rng), pos(rng), size(rng), size(rng), std::bernoulli_distribution(0.8)(rng));
        if (!disjoint_gt || std::none_of(gts.begin(), gts.end(), [&](const TextBox& o) {
                return darktext::intersection_area(o.aabb(), g.aabb()) > 0.0;
            }))
            gts.push_back(g);
    }
    for (int i = 0; i < np; ++i) {
        if (!gts.empty() && std::bernoulli_distribution(0.7)(rng)) {
            const Rect r = gts[std::uniform_int_distribution<int>(0, ng - 1)(rng)].aabb();
            preds.push_back(rect_box(r.u + jitter(rng), r.v + jitter(rng), std::max(2.0, r.w + jitter(rng)),
                                     std::max(2.0, r.h + jitter(rng))));
        } else {
            preds.push_back(rect_box(pos(rng), pos(rng), size(rng), size(rng)));
        }
    }
}

} // namespace oracle
