#pragma once

#include "core/image.hpp"

namespace darktext {

// Sobel gradient magnitude of the luma image divided by its maximum; all
// zero for flat input.
EdgeMap sobel_edges(const ImageTensor& img);

} // namespace darktext
