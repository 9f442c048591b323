#pragma once

#include "core/image.hpp"

namespace darktext {

// CIELAB L* / 100 per pixel for sRGB input (D65 white, standard sRGB
// linearisation). Output is a 1-channel map in [0, 1].
ImageTensor rgb_to_lightness(const ImageTensor& img);

double mean_lightness(const ImageTensor& img);

} // namespace darktext
