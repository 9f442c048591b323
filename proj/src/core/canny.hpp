#pragma once

#include "core/image.hpp"

namespace darktext {

struct CannyParams {
    double low_threshold = 0.1;   // fraction of the maximum gradient magnitude
    double high_threshold = 0.2;
    double sigma = 1.4;
};

// Binary (0/1) edge map: Gaussian smoothing, Sobel gradient, non-maximum
// suppression, hysteresis. Colour input is reduced with Rec.601 luma.
EdgeMap canny_edges(const ImageTensor& img, const CannyParams& params = {});

// Separable Gaussian blur with reflected borders, radius ceil(3 sigma).
ImageTensor gaussian_blur(const ImageTensor& gray, double sigma);

} // namespace darktext
