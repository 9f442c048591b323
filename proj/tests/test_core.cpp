#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "core/canny.hpp"
#include "core/color.hpp"
#include "core/edges.hpp"
#include "core/error.hpp"
#include "core/heatmap.hpp"
#include "core/image_io.hpp"

#include <opencv2/imgproc.hpp>

using namespace darktext;

namespace {

ImageTensor uniform(int h, int w, int c, double v) { return ImageTensor(h, w, c, v); }

ImageTensor vertical_step(int h, int w, int column) {
    ImageTensor img(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = column; x < w; ++x) img.at(y, x) = 1.0;
    return img;
}

double opencv_lightness(double r, double g, double b) {
    cv::Mat rgb(1, 1, CV_32FC3, cv::Scalar(r, g, b));
    cv::Mat lab;
    cv::cvtColor(rgb, lab, cv::COLOR_RGB2Lab);
    return lab.at<cv::Vec3f>(0, 0)[0] / 100.0;
}

} // namespace

TEST_CASE("lightness of black, white and mid gray") {
    CHECK(mean_lightness(uniform(4, 4, 3, 0.0)) == 0.0);
    CHECK(mean_lightness(uniform(4, 4, 3, 1.0)) == doctest::Approx(1.0).epsilon(1e-9));
    const double gray = mean_lightness(uniform(4, 4, 3, 0.5));
    CHECK(gray == doctest::Approx(0.534).epsilon(1e-3));
    }

TEST_CASE("lightness agrees with OpenCV on random colours") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        const double r = u(rng), g = u(rng), b = u(rng);
        ImageTensor px(1, 1, 3);
        px.at(0, 0, 0) = r;
        px.at(0, 0, 1) = g;
        px.at(0, 0, 2) = b;
        // OpenCV's float path interpolates the sRGB curve from a table
        CHECK(std::fabs(rgb_to_lightness(px).at(0, 0) - opencv_lightness(r, g, b)) < 2.5e-3);
    }
}

TEST_CASE("lightness matches reference CIELAB values") {
    // L*/100 of sRGB primaries and a mixed colour, D65 white
    const std::vector<std::array<double, 4>> refs{{1, 0, 0, 0.532405879437449},
                                                   {0, 1, 0, 0.8773509948831895},
                                                   {0, 0, 1, 0.3229567256501351},
                                                   {0.5, 0.5, 0.5, 0.5338896474111432},
                                                   {0.2, 0.7, 0.4, 0.6472476398166}};
    for (const auto& r : refs) {
        ImageTensor px(1, 1, 3);
        for (int c = 0; c < 3; ++c) px.at(0, 0, c) = r[c];
        CHECK(mean_lightness(px) == doctest::Approx(r[3]).epsilon(1e-4));
    }
}

TEST_CASE("canny on flat, tiny and step images") {
    CHECK(canny_edges(uniform(16, 16, 1, 0.4)).max() == 0.0);
    CHECK(canny_edges(uniform(1, 1, 3, 0.7)).max() == 0.0);

    const ImageTensor step = vertical_step(32, 32, 16);
    const EdgeMap edges = canny_edges(step);
    std::set<int> ours;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (edges.at(y, x) != 0.0) ours.insert(x);
    REQUIRE(!ours.empty());
    CHECK(*ours.rbegin() - *ours.begin() <= 1);
    CHECK(*ours.begin() >= 15);
    CHECK(*ours.rbegin() <= 16);

    cv::Mat img(32, 32, CV_8UC1, cv::Scalar(0));
    img(cv::Rect(16, 0, 16, 32)).setTo(255);
    cv::Mat ref;
    cv::Canny(img, ref, 50, 100);
    std::set<int> theirs;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (ref.at<unsigned char>(y, x)) theirs.insert(x);
    REQUIRE(!theirs.empty());
    for (int x : ours) CHECK(std::abs(x - *theirs.begin()) <= 1);
}

TEST_CASE("canny is unchanged by an offset that does not clip") {
    std::mt19937_64 rng(3);
    const ImageTensor img = testing::random_image(24, 24, 1, rng, 0.2, 0.6);
    ImageTensor shifted = img;
    for (double& v : shifted.values()) v += 0.3;
    CHECK(canny_edges(img) == canny_edges(shifted));
}

TEST_CASE("sobel edges are normalised") {
    CHECK(sobel_edges(uniform(8, 8, 3, 0.5)).max() == 0.0);
    const EdgeMap e = sobel_edges(vertical_step(10, 10, 5));
    CHECK(e.max() == doctest::Approx(1.0));
    CHECK(e.at(5, 5) == doctest::Approx(1.0));
    CHECK(e.at(5, 1) == 0.0);
}

TEST_CASE("heatmap from boxes") {
    CHECK(gaussian_box_heatmap({}, 20, 20, 1.0).max() == 0.0);

    const TextBox box = TextBox::from_rect({10, 20, 30, 10});
    const RegionHeatmap one = gaussian_box_heatmap({box}, 60, 60, 0.8);
    double best = -1;
    int by = 0, bx = 0;
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 60; ++x)
            if (one.at(y, x) > best) best = one.at(y, x), by = y, bx = x;
    CHECK(best == doctest::Approx(0.8).epsilon(1e-3));
    CHECK(std::abs(bx - 25) <= 1);
    CHECK(std::abs(by - 25) <= 1);

    const TextBox other = TextBox::from_rect({5, 45, 20, 10});
    const RegionHeatmap two = gaussian_box_heatmap({box, other}, 60, 60, 0.8);
    const RegionHeatmap only_other = gaussian_box_heatmap({other}, 60, 60, 0.8);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 60; ++x) CHECK(two.at(y, x) == std::max(one.at(y, x), only_other.at(y, x)));

    CHECK(gaussian_box_heatmap({TextBox::from_rect({10, 20, 30, 10}, false)}, 60, 60, 1.0).max() == 0.0);
    CHECK_THROWS_AS(gaussian_box_heatmap({box}, 10, 10, 0.0), Error);
}

TEST_CASE("file heatmap provider checks the declared size") {
    const auto dir = testing::fresh_dir("core_heatmap");
    write_image(dir / "map.png", uniform(8, 8, 1, 0.5));
    CHECK(FileHeatmapProvider(dir / "map.png", 2).heatmap(uniform(16, 16, 3, 0.0)).height() == 8);
    try {
        FileHeatmapProvider(dir / "map.png", 1).heatmap(uniform(16, 16, 3, 0.0));
        FAIL("expected a provider contract error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProviderContract);
    }
}

TEST_CASE("box IoU") {
    const TextBox a = TextBox::from_rect({0, 0, 10, 10});
    const TextBox b = TextBox::from_rect({5, 0, 10, 10});
    CHECK(box_iou(a, a) == 1.0);
    CHECK(box_iou(a, TextBox::from_rect({20, 20, 5, 5})) == 0.0);
    CHECK(box_iou(a, b) == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
    CHECK(box_iou(a, b, IouMode::Polygon) == doctest::Approx(50.0 / 150.0).epsilon(1e-9));
    // a diamond inside a square: polygon IoU = 1/2, aabb IoU = 1
    const TextBox diamond({Point{5, 0}, Point{10, 5}, Point{5, 10}, Point{0, 5}}, true, "");
    CHECK(box_iou(a, diamond, IouMode::AxisAligned) == doctest::Approx(1.0));
    CHECK(box_iou(a, diamond, IouMode::Polygon) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("canonical quad starts top-left and runs clockwise") {
    const auto q = canonical_quad({Point{10, 10}, Point{0, 10}, Point{0, 0}, Point{10, 0}});
    CHECK(q[0] == Point{0, 0});
    CHECK(q[1] == Point{10, 0});
    CHECK(q[2] == Point{10, 10});
    CHECK(q[3] == Point{0, 10});
}

TEST_CASE("image io round trip equals quantisation") {
    const auto dir = testing::fresh_dir("core_io");
    std::mt19937_64 rng(5);
    const ImageTensor img = testing::random_image(7, 9, 3, rng);
    write_image(dir / "a.png", img);
    CHECK(read_image(dir / "a.png") == quantize_8bit(img));
    const ImageTensor gray = read_image(dir / "a.png", ImageReadMode::Gray);
    CHECK(gray.channels() == 1);
    CHECK_THROWS_AS(read_image(dir / "missing.png"), Error);
}

TEST_CASE("image helpers") {
    ImageTensor img(2, 3, 1, std::vector<double>{0, 1, 2, 3, 4, 5});
    const ImageTensor padded = reflect_pad(img, 4, 5);
    CHECK(padded.at(0, 3) == 1.0);   // reflected about the last column
    CHECK(padded.at(2, 0) == 0.0);   // reflected about the last row
    CHECK(crop(padded, 0, 0, 2, 3) == img);
    CHECK_THROWS_AS(crop(img, 1, 0, 2, 3), Error);
    CHECK(resize_bilinear(img, 2, 3) == img);
    CHECK_THROWS_AS(ImageTensor(0, 3, 1), Error);
    CHECK_THROWS_AS(ImageTensor(2, 3, 2), Error);
    ImageTensor bad(1, 1, 1, 1.5);
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.clamp_unit();
    CHECK(bad.at(0, 0) == 1.0);
    const auto t = to_tensor(testing::random_image(3, 4, 3, *std::make_unique<std::mt19937_64>(1)));
    CHECK(t.shape() == nn::Shape{1, 3, 3, 4});
}
