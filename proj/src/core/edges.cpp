#include "core/edges.hpp"

#include <algorithm>
#include <cmath>

namespace darktext {

EdgeMap sobel_edges(const ImageTensor& img) {
    const ImageTensor gray = to_gray(img);
    const int h = gray.height();
    const int w = gray.width();
    EdgeMap out(h, w, 0.0);
    auto p = [&](int y, int x) {
        y = y < 0 ? 0 : (y >= h ? h - 1 : y);
        x = x < 0 ? 0 : (x >= w ? w - 1 : x);
        return gray.at(y, x);
    };
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double sx = (p(y - 1, x + 1) + 2 * p(y, x + 1) + p(y + 1, x + 1)) -
                              (p(y - 1, x - 1) + 2 * p(y, x - 1) + p(y + 1, x - 1));
            const double sy = (p(y + 1, x - 1) + 2 * p(y + 1, x) + p(y + 1, x + 1)) -
                              (p(y - 1, x - 1) + 2 * p(y - 1, x) + p(y - 1, x + 1));
            out.at(y, x) = std::hypot(sx, sy);
            max_mag = std::max(max_mag, out.at(y, x));
        }
    if (max_mag <= 0.0) return out;
    for (double& v : out.values()) v /= max_mag;
    return out;
}

} // namespace darktext
