#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "core/error.hpp"
#include "losses/losses.hpp"
#include "nn/ops.hpp"

using namespace darktext;
using namespace darktext::losses;
using namespace darktext::nn;

namespace {

Var filled(Shape s, double v) { return Var::constant(Tensor(s, v)); }

// Two-pixel map, first pixel an edge: loss = (beta * -log p + alpha * -log(1 - q)) / 2.
double two_pixel_bce(double p, double q) {
    const Var pred = Var::constant(Tensor({1, 1, 1, 2}, std::vector<double>{p, q}));
    return balanced_edge_bce(pred, Tensor({1, 1, 1, 2}, std::vector<double>{1.0, 0.0})).item();
}

// Direct single-scale SSIM: every valid window position, Gaussian weights,
// averaged over positions, channels and images.
double naive_ssim(const Tensor& a, const Tensor& b, int win, double sigma, double c1, double c2) {
    const Tensor g = gaussian_window(win, sigma);
    const Shape s = a.shape();
    double total = 0.0;
    int count = 0;
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y + win <= s.h; ++y)
                for (int x = 0; x + win <= s.w; ++x) {
                    double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                    for (int i = 0; i < win; ++i)
                        for (int j = 0; j < win; ++j) {
                            const double w = g.at(0, 0, i, j);
                            const double va = a.at(n, c, y + i, x + j), vb = b.at(n, c, y + i, x + j);
                            ma += w * va;
                            mb += w * vb;
                            saa += w * va * va;
                            sbb += w * vb * vb;
                            sab += w * va * vb;
                        }
                    const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
                    total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                    ++count;
                }
    return total / count;
}

} // namespace

TEST_CASE("smooth L1 closed forms") {
    const Shape s{1, 3, 4, 4};
    CHECK(smooth_l1(filled(s, 0.3), filled(s, 0.3)).item() == 0.0);
    CHECK(std::fabs(smooth_l1(filled(s, 0.75), filled(s, 0.25)).item() - 0.125) < 1e-12);
    CHECK(std::fabs(smooth_l1(filled(s, 2.5), filled(s, 0.5)).item() - 1.5) < 1e-12);
    CHECK(std::fabs(smooth_l1(filled(s, 0.5), filled(s, 0.0), 2.0).item() - 0.0625) < 1e-12);
}

TEST_CASE("smooth L1 gradient") {
    std::mt19937_64 rng(1);
    const Tensor y = testing::random_tensor({2, 3, 8, 8}, rng, -1.5, 1.5);
    const Tensor x = testing::random_tensor({2, 3, 8, 8}, rng, -1.5, 1.5);
    CHECK(testing::input_gradient_error([&](const Var& v) { return smooth_l1(v, Var::constant(y)); }, x) < 1e-4);
}

TEST_CASE("ms-ssim closed forms and symmetry") {
    MsSsimConfig one;
    one.scales = 1;
    const Shape s{1, 3, 16, 16};
    CHECK(ms_ssim(filled(s, 0.4), filled(s, 0.4), one).item() == doctest::Approx(1.0).epsilon(1e-12));
    const double c1 = 1e-4;
    CHECK(std::fabs(ms_ssim(filled(s, 0.0), filled(s, 1.0), one).item() - c1 / (1 + c1)) < 1e-12);

    std::mt19937_64 rng(2);
    MsSsimConfig three;
    three.scales = 3;
    three.window = 5;
    three.sigma = 1.0;
    for (int i = 0; i < 5; ++i) {
        const Var a = Var::constant(testing::random_tensor({1, 3, 24, 24}, rng, 0, 1));
        const Var b = Var::constant(testing::random_tensor({1, 3, 24, 24}, rng, 0, 1));
        CHECK(ms_ssim(a, b, three).item() == doctest::Approx(ms_ssim(b, a, three).item()).epsilon(1e-12));
        CHECK(ms_ssim_loss(a, a, three).item() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("single-scale ms-ssim equals a direct SSIM") {
    MsSsimConfig one;
    one.scales = 1;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const Tensor a = testing::random_tensor({2, 3, 16, 14}, rng, 0, 1);
        Tensor b = a;
        for (double& v : b.values()) v = std::clamp(v + std::normal_distribution<double>(0, 0.1)(rng), 0.0, 1.0);
        CHECK(ms_ssim(Var::constant(a), Var::constant(b), one).item() ==
              doctest::Approx(naive_ssim(a, b, 11, 1.5, 1e-4, 9e-4)).epsilon(1e-10));
    }
}

TEST_CASE("ms-ssim scale limits") {
    MsSsimConfig cfg;
    CHECK(max_feasible_scales(176, 176, cfg) == 5);
    CHECK(max_feasible_scales(175, 176, cfg) == 4);
    try {
        ms_ssim(filled({1, 3, 64, 64}, 0.2), filled({1, 3, 64, 64}, 0.2), cfg);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    cfg.weights = {1.0};
    CHECK_THROWS_AS(cfg.validate(), Error);
    const Tensor g = gaussian_window(11, 1.5);
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ms-ssim gradient") {
    MsSsimConfig cfg;
    cfg.scales = 3;
    cfg.window = 3;
    cfg.sigma = 0.8;
    std::mt19937_64 rng(4);
    const Tensor y = testing::random_tensor({1, 3, 16, 16}, rng, 0, 1);
    // a noisy copy keeps every scale's SSIM positive, away from the clamp
    Tensor x = y;
    for (double& v : x.values()) v = std::clamp(v + std::normal_distribution<double>(0, 0.1)(rng), 0.0, 1.0);
    const Var probe = Var::parameter(x);
    backward(ms_ssim_loss(probe, Var::constant(y), cfg));
    double norm = 0.0;
    for (double g : probe.grad().values()) norm += g * g;
    CHECK(norm > 0.0);
    CHECK(testing::input_gradient_error([&](const Var& v) { return ms_ssim_loss(v, Var::constant(y), cfg); }, x) <
          1e-4);
}

TEST_CASE("text detection loss") {
    const Shape s{2, 1, 8, 8};
    CHECK(text_detection_loss(filled(s, 0.3), filled(s, 0.3)).item() == 0.0);
    CHECK(std::fabs(text_detection_loss(filled(s, 0.5), filled(s, 0.25)).item() - 0.25) < 1e-12);
    try {
        text_detection_loss(filled(s, 0.5), filled({2, 1, 4, 8}, 0.25));
        FAIL("expected a provider contract error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProviderContract);
    }
    // a provider whose map is half the declared size
    struct Broken final : HeatmapProvider {
        RegionHeatmap heatmap(const ImageTensor& img) const override {
            return RegionHeatmap(img.height() / 2, img.width() / 2);
        }
    };
    CHECK_THROWS_AS(text_detection_loss(Broken{}, filled({1, 3, 8, 8}, 0.1), filled({1, 3, 8, 8}, 0.2)), Error);

    const SurrogateTextScorer scorer;
    std::mt19937_64 rng(5);
    const Tensor y = testing::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    CHECK(text_detection_loss(scorer, Var::constant(y), Var::constant(y)).item() == 0.0);
}

TEST_CASE("surrogate scorer") {
    const SurrogateTextScorer scorer(2.0);
    CHECK(scorer.differentiable());
    CHECK(scorer.heatmap(ImageTensor(8, 8, 3, 0.5)).max() < 1e-20);
    std::mt19937_64 rng(6);
    const ImageTensor img = testing::random_image(8, 8, 3, rng);
    const RegionHeatmap direct = scorer.heatmap(img);
    const Tensor graph = scorer.score(Var::constant(to_tensor(img))).value();
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(graph.at(0, 0, y, x) == doctest::Approx(direct.at(y, x)).epsilon(1e-14));
    const Tensor target = testing::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    const Tensor x = testing::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    CHECK(testing::input_gradient_error(
              [&](const Var& v) { return text_detection_loss(scorer, v, Var::constant(target)); }, x) < 1e-4);
}

TEST_CASE("balanced edge BCE class weights") {
    // equal class counts: alpha = 1.1 * 1/2, beta = 1/2
    const double l_half = two_pixel_bce(0.5, 0.5);    // (alpha + beta) ln2 / 2
    const double l_quarter = two_pixel_bce(0.25, 0.5); // (2 beta + alpha) ln2 / 2
    const double beta = (l_quarter - l_half) * 2.0 / std::log(2.0);
    const double alpha = l_half * 2.0 / std::log(2.0) - beta;
    CHECK(std::fabs(alpha - 0.55) < 1e-9);
    CHECK(std::fabs(beta - 0.5) < 1e-9);

    // the positive pixel at P = 0.5 contributes -beta log 0.5 before the 1/|I| average
    const double eps = kProbabilityEpsilon;
    const double contribution = 2.0 * two_pixel_bce(0.5, 0.0) - 0.55 * -std::log(1.0 - eps);
    CHECK(std::fabs(contribution - 0.5 * std::log(2.0)) < 1e-9);
    CHECK(contribution == doctest::Approx(0.3466).epsilon(1e-4));

    CHECK(two_pixel_bce(1.0, 0.0) < 1e-6);

    EdgeLossParams heavy;
    heavy.lambda = 2.0;
    const Var pred = Var::constant(Tensor({1, 1, 1, 2}, std::vector<double>{0.5, 0.5}));
    const Tensor gt({1, 1, 1, 2}, std::vector<double>{1.0, 0.0});
    CHECK(balanced_edge_bce(pred, gt, heavy).item() == doctest::Approx((1.0 + 0.5) * std::log(2.0) / 2).epsilon(1e-12));
}

TEST_CASE("balanced edge BCE gradient") {
    std::mt19937_64 rng(7);
    Tensor gt({2, 1, 8, 8});
    for (double& v : gt.values()) v = std::bernoulli_distribution(0.3)(rng) ? 1.0 : 0.0;
    const Tensor logits = testing::random_tensor({2, 1, 8, 8}, rng, -3, 3);
    CHECK(testing::input_gradient_error([&](const Var& v) { return balanced_edge_bce(sigmoid(v), gt); }, logits) <
          1e-4);
}

TEST_CASE("edge reconstruction loss") {
    std::mt19937_64 rng(8);
    Tensor gt({1, 1, 6, 6});
    for (double& v : gt.values()) v = std::bernoulli_distribution(0.4)(rng) ? 1.0 : 0.0;
    std::vector<Var> sides;
    for (int j = 0; j < 3; ++j) sides.push_back(Var::constant(testing::random_tensor({1, 1, 6, 6}, rng, 0.05, 0.95)));
    const Var fused = Var::constant(testing::random_tensor({1, 1, 6, 6}, rng, 0.05, 0.95));
    double separate = balanced_edge_bce(fused, gt).item();
    for (const auto& s : sides) separate += balanced_edge_bce(s, gt).item();
    CHECK(edge_reconstruction_loss(sides, fused, gt).item() == doctest::Approx(separate).epsilon(1e-14));

    const Var perfect = Var::constant(gt);
    const std::vector<Var> perfect_sides(3, perfect);
    CHECK(edge_reconstruction_loss(perfect_sides, perfect, gt).item() < 1e-5);

    try {
        edge_reconstruction_loss(std::span<const Var>(sides.data(), 2), fused, gt);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
    }

    const Tensor x = testing::random_tensor({1, 1, 6, 6}, rng, -2, 2);
    CHECK(testing::input_gradient_error(
              [&](const Var& v) {
                  const Var p = sigmoid(v);
                  const std::vector<Var> s{p, square(p), sigmoid(scale(v, 2.0))};
                  return edge_reconstruction_loss(s, p, gt);
              },
              x) < 1e-4);
}

TEST_CASE("weighted total") {
    const LossWeights w;
    const Var one = Var::constant(Tensor({1, 1, 1, 1}, 1.0));
    const Var zero = Var::constant(Tensor({1, 1, 1, 1}, 0.0));
    CHECK(std::fabs(total_enhancement_loss({one, one, one, one}, w).item() - 1.0) < 1e-12);
    CHECK(total_enhancement_loss({zero, zero, zero, zero}, w).item() == 0.0);
    CHECK(total_enhancement_loss({one, one, one, one}, LossWeights{0, 0, 0, 0}).item() == 0.0);
    const Var nan = Var::constant(Tensor({1, 1, 1, 1}, std::nan("")));
    try {
        total_enhancement_loss({one, one, nan, one}, w);
        FAIL("expected a numeric error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Numeric);
        CHECK(std::string(e.what()).find("ssim_ms") != std::string::npos);
    }
}
