#include "nn/ops.hpp"

#include "core/error.hpp"

#include <Eigen/Core>

namespace darktext::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
    int cin, h, w, k, stride, pad, oh, ow;
    int rows() const { return cin * k * k; }
    int cols() const { return oh * ow; }
};

// columns[(c*k + ky)*k + kx][oy*ow + ox] = x[c][oy*s + ky - p][ox*s + kx - p]
void im2col(const double* x, const ConvGeometry& g, double* columns) {
    for (int c = 0; c < g.cin; ++c)
        for (int ky = 0; ky < g.k; ++ky)
            for (int kx = 0; kx < g.k; ++kx) {
                double* row = columns + static_cast<std::size_t>((c * g.k + ky) * g.k + kx) * g.cols();
                for (int oy = 0; oy < g.oh; ++oy) {
                    const int iy = oy * g.stride + ky - g.pad;
                    double* dst = row + oy * g.ow;
                    if (iy < 0 || iy >= g.h) {
                        std::fill_n(dst, g.ow, 0.0);
                        continue;
                    }
                    const double* src = x + (static_cast<std::size_t>(c) * g.h + iy) * g.w;
                    for (int ox = 0; ox < g.ow; ++ox) {
                        const int ix = ox * g.stride + kx - g.pad;
                        dst[ox] = (ix < 0 || ix >= g.w) ? 0.0 : src[ix];
                    }
                }
            }
}

void col2im(const double* columns, const ConvGeometry& g, double* x) {
    for (int c = 0; c < g.cin; ++c)
        for (int ky = 0; ky < g.k; ++ky)
            for (int kx = 0; kx < g.k; ++kx) {
                const double* row = columns + static_cast<std::size_t>((c * g.k + ky) * g.k + kx) * g.cols();
                for (int oy = 0; oy < g.oh; ++oy) {
                    const int iy = oy * g.stride + ky - g.pad;
                    if (iy < 0 || iy >= g.h) continue;
                    double* dst = x + (static_cast<std::size_t>(c) * g.h + iy) * g.w;
                    const double* src = row + oy * g.ow;
                    for (int ox = 0; ox < g.ow; ++ox) {
                        const int ix = ox * g.stride + kx - g.pad;
                        if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
                    }
                }
            }
}

} // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
    const Shape xs = x.shape();
    const Shape ws = weight.shape();
    require(ws.c == xs.c && ws.h == ws.w, ErrorCode::Shape,
            "conv2d: weight " + ws.str() + " incompatible with input " + xs.str());
    require(bias.shape() == (Shape{1, ws.n, 1, 1}), ErrorCode::Shape, "conv2d: bias shape " + bias.shape().str());
    const ConvGeometry g{xs.c, xs.h, xs.w, ws.h, stride, pad, (xs.h + 2 * pad - ws.h) / stride + 1,
                         (xs.w + 2 * pad - ws.w) / stride + 1};
    require(g.oh >= 1 && g.ow >= 1, ErrorCode::Shape, "conv2d: kernel larger than padded input " + xs.str());
    const int cout = ws.n;
    const Shape os{xs.n, cout, g.oh, g.ow};
    Tensor out(os);

    std::vector<double> columns(static_cast<std::size_t>(g.rows()) * g.cols());
    ConstRowMap wmat(weight.value().data(), cout, g.rows());
    ConstRowMap cmat(columns.data(), g.rows(), g.cols());
    for (int n = 0; n < xs.n; ++n) {
        im2col(x.value().data() + static_cast<std::size_t>(n) * xs.c * xs.plane(), g, columns.data());
        RowMap omat(out.data() + static_cast<std::size_t>(n) * cout * g.cols(), cout, g.cols());
        omat.noalias() = wmat * cmat;
        for (int c = 0; c < cout; ++c) omat.row(c).array() += bias.value()[c];
    }

    return make_result(std::move(out), {x, weight, bias}, [g, xs, cout](Node& self) {
        const Tensor& xv = self.parents[0]->value;
        const Tensor& wv = self.parents[1]->value;
        Tensor* gx = self.parents[0]->requires_grad ? &self.parents[0]->grad_buffer() : nullptr;
        Tensor* gw = self.parents[1]->requires_grad ? &self.parents[1]->grad_buffer() : nullptr;
        Tensor* gb = self.parents[2]->requires_grad ? &self.parents[2]->grad_buffer() : nullptr;

        std::vector<double> columns(static_cast<std::size_t>(g.rows()) * g.cols());
        ConstRowMap wmat(wv.data(), cout, g.rows());
        for (int n = 0; n < xs.n; ++n) {
            ConstRowMap go(self.grad.data() + static_cast<std::size_t>(n) * cout * g.cols(), cout, g.cols());
            if (gb) {
                for (int c = 0; c < cout; ++c) (*gb)[c] += go.row(c).sum();
            }
            if (gw) {
                im2col(xv.data() + static_cast<std::size_t>(n) * xs.c * xs.plane(), g, columns.data());
                RowMap gwm(gw->data(), cout, g.rows());
                gwm.noalias() += go * ConstRowMap(columns.data(), g.rows(), g.cols()).transpose();
            }
            if (gx) {
                RowMap cm(columns.data(), g.rows(), g.cols());
                cm.noalias() = wmat.transpose() * go;
                col2im(columns.data(), g, gx->data() + static_cast<std::size_t>(n) * xs.c * xs.plane());
            }
        }
    });
}

} // namespace darktext::nn
