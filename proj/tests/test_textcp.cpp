#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "core/error.hpp"
#include "textcp/textcp.hpp"

using namespace darktext;
using namespace darktext::textcp;

namespace {

std::vector<data::SamplePair> corpus(int n, int size) {
    std::vector<data::SamplePair> pairs;
    for (int i = 0; i < n; ++i) pairs.push_back(testing::text_pair(size, 40 + i));
    return pairs;
}

TextCpParams params_for(const std::vector<data::SamplePair>& pairs, std::uint64_t seed) {
    TextCpParams p;
    p.stats = data::compute_box_stats(pairs);
    p.rng_seed = seed;
    return p;
}

} // namespace

TEST_CASE("pool holds legible boxes only") {
    auto pairs = corpus(1, 48);
    pairs[0].boxes.resize(3);
    pairs[0].boxes.push_back(TextBox::from_rect({1, 1, 4, 4}, false));
    pairs[0].boxes.push_back(TextBox::from_rect({6, 1, 4, 4}, false));
    const TextPool pool = build_pool(pairs);
    CHECK(pool.size() == 3);
    CHECK(pool.entries[0].long_crop.width() == int(std::ceil(pairs[0].boxes[0].aabb().w)));
    CHECK(build_pool({}).empty());
}

TEST_CASE("placement draws") {
    TextCpParams p;
    p.stats.mu_w = 30;
    p.stats.mu_h = 12;
    Rng rng(1);
    const Placement fixed = sample_placement(p, 100, 50, rng);
    CHECK(fixed.w == 30.0);
    CHECK(fixed.h == 12.0);
    CHECK(fixed.u >= 0.0);
    CHECK(fixed.u < 100.0);

    Rng a(9), b(9);
    const Placement pa = sample_placement(p, 100, 50, a);
    const Placement pb = sample_placement(p, 100, 50, b);
    CHECK(pa.u == pb.u);
    CHECK(pa.v == pb.v);

    // sizes drawn with the published corpus statistics of a real training split
    p.stats = {79.27, 34.122, 123.635, 50.92, 0, 0};
    Rng r(3);
    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) total += sample_placement(p, 512, 512, r).w;
    CHECK(std::fabs(total / draws - 79.27) < 3.0 * 123.635 / 100.0);
}

TEST_CASE("nothing happens when the image already holds enough boxes") {
    const auto pairs = corpus(2, 48);
    TextCpParams p = params_for(pairs, 1);
    p.n_target = 2;
    const auto res = text_cp_augment(pairs[0].long_exposure, pairs[0].boxes, build_pool(pairs), p);
    CHECK(res.image == pairs[0].long_exposure);
    CHECK(res.boxes == pairs[0].boxes);
    CHECK(res.attempts == 0);
}

TEST_CASE("overlapping candidates are rejected") {
    const auto pairs = corpus(2, 48);
    const TextPool pool = build_pool(pairs);
    TextCpParams p = params_for(pairs, 2);
    p.n_target = 2;
    p.max_attempts = 5;
    const std::vector<TextBox> existing{TextBox::from_rect({10, 10, 20, 10})};
    AugmentInputs in;
    in.sampler = [](Rng&) { return Placement{15, 12, 12, 6}; };
    const ImageTensor blank(48, 48, 3, 0.5);
    const auto res = text_cp_augment(blank, existing, pool, p, in);
    CHECK(res.pasted == 0);
    CHECK(res.attempts == 5);
    CHECK(res.image == blank);

    // touching edges are not an overlap
    in.sampler = [](Rng&) { return Placement{30, 10, 12, 6}; };
    const auto touching = text_cp_augment(blank, existing, pool, p, in);
    CHECK(touching.pasted == 1);
    CHECK(touching.boxes.back().aabb() == Rect{30, 10, 12, 6});
}

TEST_CASE("aspect and bounds rules") {
    const auto pairs = corpus(2, 48);
    const TextPool pool = build_pool(pairs);
    TextCpParams p = params_for(pairs, 3);
    p.n_target = 1;
    p.max_attempts = 3;
    AugmentInputs in;
    const ImageTensor blank(48, 48, 3);
    in.sampler = [](Rng&) { return Placement{1, 1, 5, 10}; };   // too tall
    CHECK(text_cp_augment(blank, {}, pool, p, in).pasted == 0);
    in.sampler = [](Rng&) { return Placement{40, 1, 10, 5}; };  // past the right edge
    CHECK(text_cp_augment(blank, {}, pool, p, in).pasted == 0);
    in.sampler = [](Rng&) { return Placement{38, 43, 10, 5}; }; // flush with both edges
    CHECK(text_cp_augment(blank, {}, pool, p, in).pasted == 1);
}

TEST_CASE("paired mode pastes matching crops into both exposures") {
    const auto pairs = corpus(2, 48);
    const TextPool pool = build_pool(pairs);
    TextCpParams p = params_for(pairs, 4);
    p.n_target = 1;
    AugmentInputs in;
    const ImageTensor blank_long(48, 48, 3, 1.0), blank_short(48, 48, 3, 0.0);
    in.paired_short = &blank_short;
    in.image_id = pairs[0].id;
    in.sampler = [](Rng&) { return Placement{2, 30, 16, 6}; };
    const auto res = text_cp_augment(blank_long, {}, pool, p, in);
    REQUIRE(res.pasted == 1);
    CHECK(res.short_image.at(32, 8, 0) != 0.0);
    CHECK(res.image.at(32, 8, 0) != 1.0);
    CHECK(res.boxes[0].transcription().rfind("w", 0) == 0);

    const ImageTensor wrong(40, 48, 3);
    in.paired_short = &wrong;
    CHECK_THROWS_AS(text_cp_augment(blank_long, {}, pool, p, in), Error);
}

TEST_CASE("an image never receives its own crops") {
    const auto pairs = corpus(1, 48);
    TextCpParams p = params_for(pairs, 5);
    AugmentInputs in;
    in.image_id = pairs[0].id;
    const auto res = text_cp_augment(pairs[0].long_exposure, {}, build_pool(pairs), p, in);
    CHECK(res.pasted == 0);
}

TEST_CASE("an empty pool is a configuration error when boxes are wanted") {
    TextCpParams p;
    CHECK_THROWS_AS(text_cp_augment(ImageTensor(8, 8, 3), {}, TextPool{}, p), Error);
}

TEST_CASE("randomised augmentation keeps every invariant") {
    const auto pairs = corpus(6, 96);
    const TextPool pool = build_pool(pairs);
    std::mt19937_64 rng(77);
    int pasted = 0;
    for (int trial = 0; trial < 200; ++trial) {
        TextCpParams p = params_for(pairs, rng());
        p.n_target = 10;
        p.gamma = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
        const auto& base = pairs[trial % pairs.size()];
        const ImageTensor image = testing::random_image(128, 160, 3, rng);
        const auto res = text_cp_augment(image, base.boxes, pool, p);
        CHECK(res.attempts <= p.max_attempts);
        pasted += res.pasted;
        for (std::size_t i = 0; i < res.boxes.size(); ++i) {
            const Rect r = res.boxes[i].aabb();
            CHECK(r.u >= 0);
            CHECK(r.v >= 0);
            CHECK(r.right() <= 160);
            CHECK(r.bottom() <= 128);
            if (i >= base.boxes.size()) CHECK(r.w / r.h >= p.gamma);
            for (std::size_t j = 0; j < i; ++j) CHECK(intersection_area(r, res.boxes[j].aabb()) == 0.0);
        }
        for (int y = 0; y < 128; ++y)
            for (int x = 0; x < 160; ++x) {
                bool inside = false;
                for (std::size_t i = base.boxes.size(); i < res.boxes.size() && !inside; ++i) {
                    const Rect r = res.boxes[i].aabb();
                    inside = x >= r.u && x < r.right() && y >= r.v && y < r.bottom();
                }
                if (!inside)
                    for (int c = 0; c < 3; ++c)
                        if (res.image.at(y, x, c) != image.at(y, x, c)) FAIL("pixel changed outside pasted boxes");
            }
    }
    CHECK(pasted > 200);
}
