#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "enhancer/network.hpp"
#include "nn/ops.hpp"

using namespace darktext;
using namespace darktext::enhancer;
using namespace darktext::nn;

namespace {

void set_unit_weights(ParameterStore& store) {
    for (const auto& [name, p] : store.entries()) {
        Var v = p;
        v.mutable_value().fill(name.ends_with(".weight") ? 1.0 : 0.0);
    }
}

Var scalar(double v) { return Var::constant(Tensor({1, 1, 1, 1}, v)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

EnhancerConfig micro_config() {
    EnhancerConfig cfg;
    cfg.levels = 2;
    cfg.base_channels = 4;
    return cfg;
}

} // namespace

TEST_CASE("attention on a single unit-weight pixel") {
    ParameterStore store;
    Rng rng(1);
    EdgeAttention att(store, "att", 1, 1, rng);
    set_unit_weights(store);
    CHECK(att.channel()(scalar(0.3)).value()[0] == doctest::Approx(sigmoid(0.3)).epsilon(1e-12));
    CHECK(sigmoid(0.3) == doctest::Approx(0.5744).epsilon(1e-4));
    CHECK(att.spatial()(scalar(0.2)).value()[0] == doctest::Approx(sigmoid(0.2)).epsilon(1e-12));
    CHECK(sigmoid(0.2) == doctest::Approx(0.5498).epsilon(1e-4));
    const double combined = att(scalar(0.3), scalar(0.2)).value()[0];
    CHECK(combined == doctest::Approx(sigmoid(0.3) * 0.3 + sigmoid(0.2) * 0.3).epsilon(1e-12));
    CHECK(combined == doctest::Approx(0.3373).epsilon(1e-4));
}

TEST_CASE("attention ranges and shapes") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const int c = 1 + trial * 2, h = 3 + trial, w = 5 - trial % 3, ec = 1 + trial % 2;
        ParameterStore store;
        Rng init(trial);
        EdgeAttention att(store, "att", c, ec, init);
        const Var f = Var::constant(testing::random_tensor({2, c, h, w}, rng, -3, 3));
        const Var e = Var::constant(testing::random_tensor({2, ec, h, w}, rng, -3, 3));
        const Tensor ach = att.channel()(f).value();
        CHECK(ach.shape() == Shape{2, c, 1, 1});
        for (double v : ach.values()) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
        const Tensor asp = att.spatial()(e).value();
        CHECK(asp.shape() == Shape{2, 1, h, w});
        for (double v : asp.values()) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
        CHECK(att(f, e).shape() == f.shape());
        CHECK(att(Var::constant(Tensor(f.shape())), e).value().sum() == 0.0);
    }
}

TEST_CASE("spatial attention of a constant edge map is constant") {
    ParameterStore store;
    Rng init(4);
    SpatialAttention sp(store, "sp", 3, init);
    Tensor e({1, 3, 5, 4});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 4; ++x) e.at(0, c, y, x) = 0.1 * (c + 1);
    const Tensor a = sp(Var::constant(e)).value();
    for (double v : a.values()) CHECK(v == doctest::Approx(a[0]).epsilon(1e-14));
}

TEST_CASE("attention gradients") {
    ParameterStore store;
    Rng init(5);
    EdgeAttention att(store, "att", 3, 2, init);
    std::mt19937_64 rng(6);
    const Tensor f = testing::random_tensor({2, 3, 4, 4}, rng);
    const Tensor e = testing::random_tensor({2, 2, 4, 4}, rng);
    const Tensor w = testing::random_tensor({2, 3, 4, 4}, rng);
    CHECK(testing::input_gradient_error(
              [&](const Var& x) { return sum(mul(att(x, Var::constant(e)), Var::constant(w))); }, f) < 1e-6);
    CHECK(testing::input_gradient_error(
              [&](const Var& x) { return sum(mul(att(Var::constant(f), x), Var::constant(w))); }, e) < 1e-6);
    CHECK(testing::parameter_gradient_error(store, [&] {
              return sum(mul(att(Var::constant(f), Var::constant(e)), Var::constant(w)));
          }) < 1e-6);
}

TEST_CASE("mismatched feature sizes are rejected") {
    ParameterStore store;
    Rng init(1);
    EdgeAttention att(store, "att", 2, 2, init);
    CHECK_THROWS_AS(att(Var::constant(Tensor({1, 2, 4, 4})), Var::constant(Tensor({1, 2, 2, 2}))), Error);
}

TEST_CASE("configuration") {
    EnhancerConfig cfg;
    CHECK(cfg.channels_at(0) == 32);
    CHECK(cfg.channels_at(4) == 512);
    CHECK(cfg.required_multiple() == 16);
    CHECK(cfg.resolved_attention_levels() == std::vector<int>{0, 1, 2, 3});
    CHECK(cfg.resolved_side_taps() == std::vector<int>{4, 3, 2});
    const EnhancerConfig micro = micro_config();
    CHECK(micro.resolved_side_taps() == std::vector<int>{1, 0, 0});
    EnhancerConfig bad = micro;
    bad.side_outputs = 2;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = micro;
    bad.levels = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("network output contract") {
    EnhancerConfig cfg;
    cfg.levels = 3;
    cfg.base_channels = 4;
    const EnhancerNetwork net(cfg, 11);
    std::mt19937_64 rng(3);
    const ImageTensor x = testing::random_image(32, 24, 3, rng, 0.0, 0.2);
    const EdgeMap e = input_edges(x, EdgeSource::Classical);
    const EnhancerOutput out = net.run(x, e);
    CHECK(out.enhanced.height() == 32);
    CHECK(out.enhanced.width() == 24);
    CHECK(out.enhanced.channels() == 3);
    CHECK(out.fused_edge.height() == 32);
    REQUIRE(out.side_edges.size() == 3);
    for (const auto& s : out.side_edges) CHECK(s.width() == 24);
    for (double v : out.enhanced.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (double v : out.fused_edge.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const EnhancerOutput again = net.run(x, e);
    CHECK(again.enhanced == out.enhanced);
    CHECK(again.fused_edge == out.fused_edge);
    CHECK(EnhancerNetwork(cfg, 11).run(x, e).enhanced == out.enhanced);

    try {
        net.run(testing::random_image(30, 24, 3, rng), EdgeMap(30, 24));
        FAIL("expected a shape error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::Shape);
    }
}

TEST_CASE("network gradients match central differences") {
    EnhancerNetwork net(micro_config(), 21);
    auto& store = net.parameters();
    std::mt19937_64 rng(8);
    const Var x = Var::constant(testing::random_tensor({1, 3, 16, 16}, rng, 0.0, 1.0));
    const Var e = Var::constant(testing::random_tensor({1, 1, 16, 16}, rng, 0.0, 1.0));
    const auto loss = [&] {
        const EnhancerVars out = net.forward(x, e);
        Var total = add(sum(out.enhanced), sum(out.fused_edge));
        for (const auto& s : out.side_edges) total = add(total, sum(s));
        return total;
    };
    CHECK(testing::parameter_gradient_error(store, loss) < 1e-3);
}

TEST_CASE("input edge maps") {
    CHECK(input_edges(ImageTensor(8, 8, 3, 0.3), EdgeSource::Classical).max() == 0.0);
    ImageTensor step(8, 8, 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x)
            for (int c = 0; c < 3; ++c) step.at(y, x, c) = 1.0;
    const EdgeMap e = input_edges(step, EdgeSource::Classical);
    CHECK(e.max() == doctest::Approx(1.0));
    CHECK(e.at(3, 4) == doctest::Approx(1.0));

    const auto dir = testing::fresh_dir("enhancer_edges");
    write_map(dir / "e.png", e);
    CHECK(input_edges(step, EdgeSource::File, dir / "e.png") == map_from_image<EdgeMap>(quantize_8bit(as_image(e))));
    try {
        input_edges(ImageTensor(6, 8, 3), EdgeSource::File, dir / "e.png");
        FAIL("expected a size error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ProviderContract);
    }
}
