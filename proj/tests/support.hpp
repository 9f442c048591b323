#pragma once

#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/image_io.hpp"
#include "dataset/dataset.hpp"
#include "dataset/icdar.hpp"
#include "dataset/manifest.hpp"
#include "nn/autograd.hpp"
#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <set>

namespace testing {

using darktext::nn::Shape;
using darktext::nn::Tensor;
using darktext::nn::Var;

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(shape);
    std::uniform_real_distribution<double> d(lo, hi);
    for (double& v : t.values()) v = d(rng);
    return t;
}

// ||a - n|| / max(||a||, ||n||): analytic vs central-difference gradient.
inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double diff = 0.0, na = 0.0, nn_ = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        na += analytic[i] * analytic[i];
        nn_ += numeric[i] * numeric[i];
    }
    const double scale = std::max({std::sqrt(na), std::sqrt(nn_), 1e-12});
    return std::sqrt(diff) / scale;
}

// Gradient of the scalar f(x) with respect to x.
inline double input_gradient_error(const std::function<Var(const Var&)>& f, const Tensor& x0, double h = 1e-6) {
    Var x = Var::parameter(x0);
    const Var y = f(x);
    darktext::nn::backward(y);
    const auto g = x.grad().values();
    std::vector<double> analytic(g.begin(), g.end());
    std::vector<double> numeric(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        Tensor plus = x0, minus = x0;
        plus[i] += h;
        minus[i] -= h;
        numeric[i] = (f(Var::constant(plus)).item() - f(Var::constant(minus)).item()) / (2.0 * h);
    }
    return relative_error(analytic, numeric);
}

// Gradient of loss() with respect to every parameter in the store.
inline double parameter_gradient_error(darktext::nn::ParameterStore& store, const std::function<Var()>& loss,
                                       double h = 1e-6) {
    store.zero_grad();
    darktext::nn::backward(loss());
    std::vector<double> analytic, numeric;
    for (const auto& [name, p] : store.entries()) {
        const auto g = p.grad().values();
        analytic.insert(analytic.end(), g.begin(), g.end());
        Var handle = p;
        Tensor& value = handle.mutable_value();
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double keep = value[i];
            value[i] = keep + h;
            const double up = loss().item();
            value[i] = keep - h;
            const double down = loss().item();
            value[i] = keep;
            numeric.push_back((up - down) / (2.0 * h));
        }
    }
    return relative_error(analytic, numeric);
}

inline darktext::ImageTensor random_image(int h, int w, int c, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    darktext::ImageTensor img(h, w, c);
    std::uniform_real_distribution<double> d(lo, hi);
    for (double& v : img.values()) v = d(rng);
    return img;
}

// A bright textured scene with dark "word" blocks made of vertical strokes,
// their boxes, and a short exposure at `gain` times the brightness.
inline darktext::data::SamplePair text_pair(int size, std::uint64_t seed, double gain = 0.1, int words = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    darktext::ImageTensor bright(size, size, 3);
    const double base[3] = {0.45 + 0.2 * u(rng), 0.45 + 0.2 * u(rng), 0.45 + 0.2 * u(rng)};
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c)
                bright.at(y, x, c) = std::clamp(base[c] + 0.15 * std::sin(0.2 * x + 0.1 * c) * std::cos(0.15 * y), 0.0, 1.0);
    std::vector<darktext::TextBox> boxes;
    const int bw = size / 3;
    const int bh = std::max(6, size / 8);
    for (int k = 0; k < words; ++k) {
        const int x0 = 2 + (k % 2) * (size / 2);
        const int y0 = 2 + k * (size / words);
        if (x0 + bw >= size || y0 + bh >= size) break;
        for (int y = y0 + 1; y < y0 + bh - 1; ++y)
            for (int x = x0 + 1; x < x0 + bw - 1; ++x)
                if ((x - x0) % 3 != 0)
                    for (int c = 0; c < 3; ++c) bright.at(y, x, c) = 0.05 + 0.05 * c;
        boxes.push_back(darktext::TextBox::from_rect({double(x0), double(y0), double(bw), double(bh)}, true,
                                                     "w" + std::to_string(k)));
    }
    darktext::ImageTensor dark = bright;
    for (double& v : dark.values()) v *= gain;
    return {dark, bright, boxes, "pair" + std::to_string(seed)};
}

// Writes `count` synthetic pairs under `dir` (short/, long/, annotations/)
// with a manifest whose first `train` entries form the train split.
inline std::filesystem::path write_corpus(const std::filesystem::path& dir, int count, int size, int train,
                                          double gain = 0.1) {
    namespace fs = std::filesystem;
    std::vector<darktext::data::ManifestEntry> entries;
    for (int i = 0; i < count; ++i) {
        const auto pair = text_pair(size, 100 + i, gain);
        const std::string id = "img" + std::to_string(i);
        darktext::data::ManifestEntry e;
        e.short_path = dir / "short" / (id + ".png");
        e.long_path = dir / "long" / (id + ".png");
        e.annotation_path = dir / "annotations" / (id + ".txt");
        e.split = i < train ? "train" : "test";
        e.id = id;
        fs::create_directories(e.short_path.parent_path());
        fs::create_directories(e.long_path.parent_path());
        darktext::write_image(e.short_path, pair.short_exposure);
        darktext::write_image(e.long_path, pair.long_exposure);
        darktext::data::write_icdar_file(e.annotation_path, pair.boxes);
        entries.push_back(e);
    }
    const fs::path manifest = dir / "manifest.csv";
    darktext::data::write_manifest(manifest, entries);
    return manifest;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("darktext_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
