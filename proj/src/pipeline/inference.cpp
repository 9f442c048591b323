#include "pipeline/inference.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <algorithm>

namespace darktext::pipeline {

namespace {

struct Frame {
    ImageTensor image;
    ImageTensor edges;
};

EnhanceResult run_padded(const enhancer::EnhancerNetwork& net, const Frame& frame) {
    const int m = net.config().required_multiple();
    const int h = frame.image.height();
    const int w = frame.image.width();
    const int ph = (h + m - 1) / m * m;
    const int pw = (w + m - 1) / m * m;
    const ImageTensor img = ph == h && pw == w ? frame.image : reflect_pad(frame.image, ph, pw);
    const ImageTensor edge = ph == h && pw == w ? frame.edges : reflect_pad(frame.edges, ph, pw);
    const auto out = net.run(img, map_from_image<EdgeMap>(edge));
    EnhanceResult r;
    r.enhanced = ph == h && pw == w ? out.enhanced : crop(out.enhanced, 0, 0, h, w);
    const ImageTensor fused = as_image(out.fused_edge);
    r.fused_edge = map_from_image<EdgeMap>(ph == h && pw == w ? fused : crop(fused, 0, 0, h, w));
    return r;
}

double ramp(int d, int overlap) {
    return std::min(1.0, static_cast<double>(d + 1) / static_cast<double>(overlap + 1));
}

} // namespace

std::vector<int> tile_starts(int length, int size, int overlap) {
    require(size > overlap && overlap >= 0, ErrorCode::Config, "tile size must exceed the tile overlap");
    if (length <= size) return {0};
    std::vector<int> starts;
    const int stride = size - overlap;
    for (int s = 0;; s += stride) {
        if (s + size >= length) {
            starts.push_back(length - size);
            break;
        }
        starts.push_back(s);
    }
    return starts;
}

std::vector<ImageTensor> run_tiled(int height, int width, const TileSpec& tiles, const TileFn& fn) {
    const auto ys = tile_starts(height, tiles.size, tiles.overlap);
    const auto xs = tile_starts(width, tiles.size, tiles.overlap);
    const int th = std::min(tiles.size, height);
    const int tw = std::min(tiles.size, width);
    std::vector<ImageTensor> acc;
    std::vector<double> weight(static_cast<std::size_t>(height) * width, 0.0);
    for (int y0 : ys) {
        for (int x0 : xs) {
            const auto outs = fn(y0, x0, th, tw);
            if (acc.empty()) {
                for (const auto& o : outs) acc.emplace_back(height, width, o.channels(), 0.0);
            }
            require(outs.size() == acc.size(), ErrorCode::Shape, "tile function changed its output count");
            for (int y = 0; y < th; ++y) {
                const double wy = ramp(std::min(y, th - 1 - y), tiles.overlap);
                for (int x = 0; x < tw; ++x) {
                    const double wt = wy * ramp(std::min(x, tw - 1 - x), tiles.overlap);
                    weight[static_cast<std::size_t>(y0 + y) * width + x0 + x] += wt;
                    for (std::size_t k = 0; k < outs.size(); ++k) {
                        require(outs[k].height() == th && outs[k].width() == tw, ErrorCode::Shape,
                                "tile function changed the tile size");
                        for (int c = 0; c < outs[k].channels(); ++c)
                            acc[k].at(y0 + y, x0 + x, c) += wt * outs[k].at(y, x, c);
                    }
                }
            }
        }
    }
    for (auto& a : acc)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < a.channels(); ++c) a.at(y, x, c) /= weight[static_cast<std::size_t>(y) * width + x];
    return acc;
}

EnhanceResult enhance_image(const enhancer::EnhancerNetwork& net, const ImageTensor& x, const EdgeMap& edges,
                            const TileSpec& tiles) {
    require(x.channels() == 3, ErrorCode::InvalidArgument, "enhancer input must be RGB");
    require(edges.height() == x.height() && edges.width() == x.width(), ErrorCode::Shape,
            "edge map and image differ in size");
    const ImageTensor edge_img = as_image(edges);
    if (!tiles.enabled || (x.height() <= tiles.size && x.width() <= tiles.size)) {
        return run_padded(net, {x, edge_img});
    }
    const auto blended = run_tiled(x.height(), x.width(), tiles, [&](int y0, int x0, int h, int w) {
        const EnhanceResult r = run_padded(net, {crop(x, y0, x0, h, w), crop(edge_img, y0, x0, h, w)});
        return std::vector<ImageTensor>{r.enhanced, as_image(r.fused_edge)};
    });
    return {blended[0], map_from_image<EdgeMap>(blended[1])};
}

ImageTensor synthesize_image(const synth::CurveNetwork& net, const ImageTensor& y, bool clamp, const TileSpec& tiles) {
    require(y.channels() == 3, ErrorCode::InvalidArgument, "synthesis input must be RGB");
    auto run = [&](const ImageTensor& tile) {
        const nn::Var input = nn::Var::constant(to_tensor(tile));
        return image_from_tensor(synth::apply_curve(input, net.forward(input), clamp).value());
    };
    if (!tiles.enabled || (y.height() <= tiles.size && y.width() <= tiles.size)) return run(y);
    return run_tiled(y.height(), y.width(), tiles, [&](int y0, int x0, int h, int w) {
        return std::vector<ImageTensor>{run(crop(y, y0, x0, h, w))};
    })[0];
}

} // namespace darktext::pipeline
