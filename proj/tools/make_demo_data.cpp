// Generates a small synthetic paired low-light text corpus: well-lit scenes
// with rendered words, darkened noisy counterparts, ICDAR annotations, a
// manifest and a starter configuration.
#include "core/image.hpp"
#include "core/image_io.hpp"
#include "dataset/icdar.hpp"
#include "dataset/manifest.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace darktext;

namespace {

const char* kWords[] = {"EXIT", "open", "Cafe", "STOP", "Hotel", "sale", "Bus", "Taxi", "Park", "INFO", "Metro", "Bank"};

ImageTensor from_mat(const cv::Mat& m) {
    ImageTensor img(m.rows, m.cols, 3);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const auto& p = m.at<cv::Vec3b>(y, x);
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = p[2 - c] / 255.0;
        }
    return img;
}

struct Scene {
    ImageTensor image;
    std::vector<TextBox> boxes;
};

Scene make_scene(int size, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> colour(40, 220);
    cv::Mat m(size, size, CV_8UC3);
    const cv::Vec3b a(colour(rng), colour(rng), colour(rng));
    const cv::Vec3b b(colour(rng), colour(rng), colour(rng));
    for (int y = 0; y < size; ++y) {
        const double t = static_cast<double>(y) / (size - 1);
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) m.at<cv::Vec3b>(y, x)[c] = static_cast<uchar>((1 - t) * a[c] + t * b[c]);
    }
    std::uniform_int_distribution<int> pos(0, size - 1);
    for (int i = 0; i < 4; ++i) {
        cv::rectangle(m, cv::Point(pos(rng), pos(rng)), cv::Point(pos(rng), pos(rng)),
                      cv::Scalar(colour(rng), colour(rng), colour(rng)), cv::FILLED);
    }

    Scene scene;
    std::vector<cv::Rect> taken;
    std::uniform_int_distribution<int> word(0, static_cast<int>(std::size(kWords)) - 1);
    std::uniform_real_distribution<double> scale(0.4, 0.9);
    const int wanted = 2 + static_cast<int>(rng() % 3);
    for (int attempt = 0; attempt < 50 && static_cast<int>(scene.boxes.size()) < wanted; ++attempt) {
        const bool legible = rng() % 5 != 0;
        const std::string text = kWords[word(rng)];
        const double s = legible ? scale(rng) : 0.3;
        int baseline = 0;
        const cv::Size extent = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, s, 1 + (s > 0.6), &baseline);
        const int w = extent.width + 4;
        const int h = extent.height + baseline + 4;
        if (w >= size || h >= size) continue;
        const cv::Rect r(static_cast<int>(rng() % (size - w)), static_cast<int>(rng() % (size - h)), w, h);
        if (std::any_of(taken.begin(), taken.end(), [&](const cv::Rect& t) { return (t & r).area() > 0; })) continue;
        taken.push_back(r);
        const cv::Vec3b bg = m.at<cv::Vec3b>(r.y + h / 2, r.x + w / 2);
        const int lum = (bg[0] + bg[1] + bg[2]) / 3;
        const cv::Scalar ink = lum > 128 ? cv::Scalar(15, 15, 15) : cv::Scalar(245, 245, 245);
        cv::putText(m, text, cv::Point(r.x + 2, r.y + 2 + extent.height), cv::FONT_HERSHEY_SIMPLEX, s, ink,
                    1 + (s > 0.6), cv::LINE_AA);
        scene.boxes.push_back(TextBox::from_rect(Rect{static_cast<double>(r.x), static_cast<double>(r.y),
                                                      static_cast<double>(w), static_cast<double>(h)},
                                                 legible, legible ? text : std::string{}));
    }
    scene.image = from_mat(m);
    return scene;
}

ImageTensor darken(const ImageTensor& img, double gain, double noise, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, noise);
    ImageTensor out = img;
    for (double& v : out.values()) v = std::clamp(v * gain + n(rng), 0.0, 1.0);
    return quantize_8bit(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic paired low-light text corpus"};
    fs::path out;
    int count = 8;
    int size = 128;
    std::uint64_t seed = 7;
    double gain = 0.1;
    app.add_option("--out", out, "Output directory")->required();
    app.add_option("--count", count, "Number of image pairs")->check(CLI::Range(2, 10000));
    app.add_option("--size", size, "Square image side in pixels")->check(CLI::Range(64, 4096));
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--gain", gain, "Brightness factor of the short exposure")->check(CLI::Range(0.01, 1.0));
    CLI11_PARSE(app, argc, argv);

    try {
        std::mt19937_64 rng(seed);
        std::vector<data::ManifestEntry> entries;
        for (int i = 0; i < count; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "scene_%04d", i);
            const Scene scene = make_scene(size, rng);
            const ImageTensor bright = quantize_8bit(scene.image);
            data::ManifestEntry e{out / "short" / (std::string(id) + ".png"), out / "long" / (std::string(id) + ".png"),
                                  out / "annotations" / (std::string(id) + ".txt"),
                                  i < count * 3 / 4 ? "train" : "test", id};
            write_image(e.long_path, bright);
            write_image(e.short_path, darken(bright, gain, 0.004, rng));
            data::write_icdar_file(e.annotation_path, scene.boxes);
            entries.push_back(e);
        }
        data::write_manifest(out / "manifest.csv", entries);

        const nlohmann::json config = {
            {"profile", "desk"},
            {"seed", seed},
            {"output_dir", "runs"},
            {"data", {{"manifest", "manifest.csv"}}},
            {"train_enhance", {{"epochs", 20}}},
            {"train_synth", {{"epochs", 20}}},
            {"enhance", {{"checkpoint", "runs/enhancer.ckpt"}, {"input_dir", "short"}, {"panels", true}}},
            {"synthesize", {{"checkpoint", "runs/synth.ckpt"}, {"input_dir", "long"}}},
            {"evaluate", {{"enhanced_dir", "runs/enhanced"}, {"reference_dir", "long"}, {"annotation_dir", "annotations"}}},
        };
        std::ofstream(out / "config.json") << config.dump(2) << '\n';
        std::printf("wrote %d pairs to %s\n", count, out.string().c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "darktext-demo-data: %s\n", e.what());
        return 1;
    }
    return 0;
}
