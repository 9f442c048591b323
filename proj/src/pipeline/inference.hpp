#pragma once

#include "enhancer/network.hpp"
#include "synthdce/curve_network.hpp"

#include <functional>

namespace darktext::pipeline {

struct TileSpec {
    bool enabled = false;
    int size = 512;
    int overlap = 64;
};

struct EnhanceResult {
    ImageTensor enhanced;
    EdgeMap fused_edge;
};

// Runs the enhancer on a whole image. Sizes that are not a multiple of the
// network's required factor are reflect-padded and the outputs cropped
// back. With tiling enabled, overlapping tiles are processed independently
// and blended with linear ramps across the overlaps.
EnhanceResult enhance_image(const enhancer::EnhancerNetwork& net, const ImageTensor& x, const EdgeMap& edges,
                            const TileSpec& tiles = {});

// Tile origins along one axis: stride size - overlap, last tile flush with
// the far edge.
std::vector<int> tile_starts(int length, int size, int overlap);

// Calls `fn` on every tile window (y0, x0, h, w) of a height x width frame
// and blends each returned image into a full-size result, weighting pixels
// by linear ramps that rise across the overlap from each tile edge.
using TileFn = std::function<std::vector<ImageTensor>(int y0, int x0, int h, int w)>;
std::vector<ImageTensor> run_tiled(int height, int width, const TileSpec& tiles, const TileFn& fn);

ImageTensor synthesize_image(const synth::CurveNetwork& net, const ImageTensor& y, bool clamp,
                             const TileSpec& tiles = {});

} // namespace darktext::pipeline
