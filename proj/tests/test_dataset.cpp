#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "dataset/icdar.hpp"
#include "dataset/manifest.hpp"
#include "dataset/patch.hpp"

#include <fstream>

using namespace darktext;
using namespace darktext::data;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("icdar lines") {
    const TextBox hello = parse_icdar_line("10,10,50,10,50,30,10,30,hello");
    CHECK(hello.aabb() == Rect{10, 10, 40, 20});
    CHECK(hello.legible());
    CHECK(hello.transcription() == "hello");

    const TextBox dont_care = parse_icdar_line("0,0,5,0,5,5,0,5,###");
    CHECK_FALSE(dont_care.legible());
    CHECK(dont_care.transcription().empty());

    CHECK(code_of([] { parse_icdar_line("1,2,3"); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse_icdar_line("1,2,3,4,5,6,7,x,word"); }) == ErrorCode::Parse);

    CHECK(parse_icdar_line("1,2,3,2,3,4,1,4,a,b").transcription() == "a,b");
    const TextBox detection = parse_icdar_line("1,2,3,2,3,4,1,4");
    CHECK(detection.aabb() == Rect{1, 2, 2, 2});
}

TEST_CASE("icdar files round trip and tolerate a BOM") {
    const auto dir = testing::fresh_dir("dataset_icdar");
    const std::vector<TextBox> boxes{parse_icdar_line("10,10,50,10,50,30,10,30,hello"),
                                     parse_icdar_line("0.5,0,5,0,5,5,0,5,###")};
    write_icdar_file(dir / "a.txt", boxes);
    CHECK(read_icdar_file(dir / "a.txt") == boxes);

    std::ofstream(dir / "bom.txt") << "\xEF\xBB\xBF" << "1,1,4,1,4,3,1,3,x\n\n";
    CHECK(read_icdar_file(dir / "bom.txt").size() == 1);
    std::ofstream(dir / "bad.txt") << "1,1,4,1,4,3,1,3,x\n1,2\n";
    try {
        read_icdar_file(dir / "bad.txt");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("loading pairs") {
    const auto dir = testing::fresh_dir("dataset_pairs");
    const auto pair = testing::text_pair(40, 3);
    write_image(dir / "s.png", pair.short_exposure);
    write_image(dir / "l.png", pair.long_exposure);
    write_icdar_file(dir / "a.txt", pair.boxes);
    const SamplePair loaded = load_pair(dir / "s.png", dir / "l.png", dir / "a.txt");
    CHECK(loaded.boxes.size() == pair.boxes.size());
    CHECK(loaded.id == "l");

    write_image(dir / "big.png", ImageTensor(80, 100, 3));
    write_image(dir / "small.png", ImageTensor(160, 200, 3));
    CHECK(code_of([&] { load_pair(dir / "big.png", dir / "small.png", dir / "a.txt"); }) == ErrorCode::Data);

    CHECK(code_of([&] { load_pair(dir / "s.png", dir / "l.png", dir / "none.txt"); }) == ErrorCode::Io);
    LoadOptions lax;
    lax.allow_unlabeled = true;
    CHECK(load_pair(dir / "s.png", dir / "l.png", dir / "none.txt", lax).boxes.empty());
}

TEST_CASE("boxes are clamped to the image") {
    const auto clamped = clamp_boxes_to_image(
        {TextBox::from_rect({-5, 2, 10, 4}), TextBox::from_rect({30, 30, 5, 5}), TextBox::from_rect({1, 1, 2, 2})},
        20, 20);
    REQUIRE(clamped.size() == 2);
    CHECK(clamped[0].aabb() == Rect{0, 2, 5, 4});
}

TEST_CASE("box statistics") {
    const auto two = compute_box_stats({TextBox::from_rect({0, 0, 10, 4}), TextBox::from_rect({0, 0, 20, 4})});
    CHECK(two.mu_w == 15.0);
    CHECK(two.sigma_w == 5.0);
    CHECK(two.sigma_h == 0.0);

    const auto one = compute_box_stats({TextBox::from_rect({0, 0, 7, 3})});
    CHECK(one.sigma_w == 0.0);
    CHECK(one.sigma_h == 0.0);

    const auto mixed = compute_box_stats({TextBox::from_rect({0, 0, 7, 3}), TextBox::from_rect({0, 0, 1, 1}, false)});
    CHECK(mixed.count_legible == 1);
    CHECK(mixed.count_illegible == 1);
    CHECK(mixed.mu_w == 7.0);

    CHECK_THROWS_AS(compute_box_stats(std::vector<TextBox>{}), Error);
}

TEST_CASE("box statistics agree with a two-pass computation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.5, 300.0);
    std::uniform_int_distribution<int> count(1, 1000);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TextBox> boxes;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) boxes.push_back(TextBox::from_rect({0, 0, u(rng), u(rng)}));
        double sw = 0, sh = 0;
        for (const auto& b : boxes) sw += b.aabb().w, sh += b.aabb().h;
        const double mw = sw / n, mh = sh / n;
        double vw = 0, vh = 0;
        for (const auto& b : boxes) {
            vw += (b.aabb().w - mw) * (b.aabb().w - mw);
            vh += (b.aabb().h - mh) * (b.aabb().h - mh);
        }
        const auto s = compute_box_stats(boxes);
        CHECK(s.mu_w == doctest::Approx(mw).epsilon(1e-9));
        CHECK(s.mu_h == doctest::Approx(mh).epsilon(1e-9));
        CHECK(s.sigma_w == doctest::Approx(std::sqrt(vw / n)).epsilon(1e-9));
        CHECK(s.sigma_h == doctest::Approx(std::sqrt(vh / n)).epsilon(1e-9));
    }
}

TEST_CASE("patch sampling") {
    SamplePair pair = testing::text_pair(64, 9);
    pair.boxes = {TextBox::from_rect({20, 20, 10, 6}, true, "only")};
    PatchSpec spec;
    spec.size = 32;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PatchSample p = sample_patch(pair, spec, seed);
        CHECK(p.long_patch.height() == 32);
        REQUIRE(p.boxes.size() == 1);
        CHECK(p.boxes[0].legible());
        const Rect r = p.boxes[0].aabb();
        CHECK(r.w * r.h == doctest::Approx(60.0));
    }
    const PatchSample a = sample_patch(pair, spec, 5);
    const PatchSample b = sample_patch(pair, spec, 5);
    CHECK(a.long_patch == b.long_patch);
    CHECK(a.short_patch == b.short_patch);
    CHECK(a.boxes == b.boxes);

    spec.size = 128;
    CHECK(code_of([&] { sample_patch(pair, spec, 0); }) == ErrorCode::Shape);
    spec.size = 8;
    CHECK(code_of([&] { sample_patch(pair, spec, 0); }) == ErrorCode::SamplingExhausted);
    pair.boxes.clear();
    spec.size = 16;
    CHECK(code_of([&] { sample_patch(pair, spec, 0); }) == ErrorCode::SamplingExhausted);
    spec.require_legible_text = false;
    CHECK(sample_patch(pair, spec, 0).long_patch.width() == 16);
}

TEST_CASE("patch windows move boxes with the pixels") {
    ImageTensor img(8, 8, 1);
    img.at(1, 2) = 1.0;   // marks the box's top-left pixel
    const std::vector<TextBox> boxes{TextBox::from_rect({2, 1, 1, 1})};
    PatchSpec spec;
    for (int mask = 0; mask < 8; ++mask) {
        PatchWindow w{0, 0, 8, bool(mask & 1), bool(mask & 2), bool(mask & 4)};
        const ImageTensor moved = apply_window(img, w);
        const auto moved_boxes = apply_window(boxes, w, spec);
        REQUIRE(moved_boxes.size() == 1);
        const Rect r = moved_boxes[0].aabb();
        CHECK(r.w == 1.0);
        CHECK(moved.at(int(r.v), int(r.u)) == 1.0);
    }
}

TEST_CASE("box kept or dropped by the area fraction left in the window") {
    PatchSpec spec;
    spec.keep_fraction = 0.5;
    const PatchWindow w{0, 0, 10};
    const std::vector<TextBox> boxes{TextBox::from_rect({6, 0, 8, 2}), TextBox::from_rect({8, 4, 8, 2})};
    auto kept = apply_window(boxes, w, spec);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].aabb() == Rect{6, 0, 4, 2});
    spec.dropped_to_dont_care = true;
    kept = apply_window(boxes, w, spec);
    REQUIRE(kept.size() == 2);
    CHECK_FALSE(kept[1].legible());
}

TEST_CASE("manifest round trip") {
    const auto dir = testing::fresh_dir("dataset_manifest");
    const auto manifest = testing::write_corpus(dir / "corpus", 3, 32, 2);
    const auto entries = read_manifest(manifest);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].split == "train");
    CHECK(entries[2].split == "test");
    CHECK(std::filesystem::exists(entries[1].long_path));
    CHECK(load_split(entries, "train").size() == 2);
    CHECK(code_of([&] { load_split(entries, "val"); }) == ErrorCode::EmptyCorpus);

    std::ofstream(dir / "bad.csv") << "a,b\n";
    CHECK(code_of([&] { read_manifest(dir / "bad.csv"); }) == ErrorCode::Parse);
}
