#include "nn/ops.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace darktext::nn {

namespace {

Tensor* parent_grad(Node& self, std::size_t i) {
    auto& p = self.parents[i];
    return p->requires_grad ? &p->grad_buffer() : nullptr;
}

const Tensor& parent_value(const Node& self, std::size_t i) { return self.parents[i]->value; }

// y = f(x), dy/dx = df(x, y)
template <class F, class DF>
Var unary(const Var& a, F f, DF df) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    return make_result(std::move(out), {a}, [df](Node& self) {
        Tensor* gx = parent_grad(self, 0);
        if (!gx) return;
        const Tensor& x = parent_value(self, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            (*gx)[i] += self.grad[i] * df(x[i], self.value[i]);
        }
    });
}

// z = f(a, b) elementwise with partials (da, db) = df(a, b, z)
template <class F, class DA, class DB>
Var binary(const Var& a, const Var& b, const char* name, F f, DA da, DB db) {
    require_same_shape(a.shape(), b.shape(), name);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], y[i]);
    return make_result(std::move(out), {a, b}, [da, db](Node& self) {
        const Tensor& x = parent_value(self, 0);
        const Tensor& y = parent_value(self, 1);
        if (Tensor* gx = parent_grad(self, 0)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                (*gx)[i] += self.grad[i] * da(x[i], y[i], self.value[i]);
        }
        if (Tensor* gy = parent_grad(self, 1)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                (*gy)[i] += self.grad[i] * db(x[i], y[i], self.value[i]);
        }
    });
}

double sgn(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

} // namespace

Var add(const Var& a, const Var& b) {
    return binary(
        a, b, "add", [](double x, double y) { return x + y; },
        [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
    return binary(
        a, b, "sub", [](double x, double y) { return x - y; },
        [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
    return binary(
        a, b, "mul", [](double x, double y) { return x * y; },
        [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Var div(const Var& a, const Var& b) {
    return binary(
        a, b, "div", [](double x, double y) { return x / y; },
        [](double, double y, double) { return 1.0 / y; },
        [](double x, double y, double) { return -x / (y * y); });
}

Var add_scalar(const Var& a, double s) {
    return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var scale(const Var& a, double s) {
    return unary(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Var square(const Var& a) {
    return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var abs(const Var& a) {
    return unary(a, [](double x) { return std::fabs(x); }, [](double x, double) { return sgn(x); });
}

Var log(const Var& a) {
    return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var exp(const Var& a) {
    return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var pow_scalar(const Var& a, double p) {
    return unary(
        a, [p](double x) { return std::pow(x, p); },
        [p](double x, double) { return p * std::pow(x, p - 1.0); });
}

Var clamp_min(const Var& a, double lo) {
    return unary(
        a, [lo](double x) { return std::max(x, lo); },
        [lo](double x, double) { return x > lo ? 1.0 : 0.0; });
}

Var sigmoid(const Var& a) {
    return unary(
        a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& a) {
    return unary(
        a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var& a) {
    return unary(
        a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x >= 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
    return unary(
        a, [slope](double x) { return x > 0.0 ? x : slope * x; },
        [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var sum(const Var& a) {
    Tensor out(Shape{1, 1, 1, 1}, a.value().sum());
    return make_result(std::move(out), {a}, [](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            const double s = self.grad[0];
            for (auto& v : g->values()) v += s;
        }
    });
}

Var mean(const Var& a) {
    const double n = static_cast<double>(a.value().size());
    Tensor out(Shape{1, 1, 1, 1}, a.value().sum() / n);
    return make_result(std::move(out), {a}, [n](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            const double s = self.grad[0] / n;
            for (auto& v : g->values()) v += s;
        }
    });
}

Var mean_per_sample(const Var& a) {
    const Shape s = a.shape();
    const std::size_t per = s.numel() / s.n;
    Tensor out(Shape{s.n, 1, 1, 1});
    for (int n = 0; n < s.n; ++n) {
        double acc = 0.0;
        const double* p = a.value().data() + n * per;
        for (std::size_t i = 0; i < per; ++i) acc += p[i];
        out[n] = acc / static_cast<double>(per);
    }
    return make_result(std::move(out), {a}, [per](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            for (std::size_t n = 0; n < self.grad.size(); ++n) {
                const double v = self.grad[n] / static_cast<double>(per);
                double* p = g->data() + n * per;
                for (std::size_t i = 0; i < per; ++i) p[i] += v;
            }
        }
    });
}

Var global_avg_pool(const Var& a) {
    const Shape s = a.shape();
    const std::size_t plane = s.plane();
    Tensor out(Shape{s.n, s.c, 1, 1});
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double* p = a.value().data() + k * plane;
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += p[i];
        out[k] = acc / static_cast<double>(plane);
    }
    return make_result(std::move(out), {a}, [plane](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            for (std::size_t k = 0; k < self.grad.size(); ++k) {
                const double v = self.grad[k] / static_cast<double>(plane);
                double* p = g->data() + k * plane;
                for (std::size_t i = 0; i < plane; ++i) p[i] += v;
            }
        }
    });
}

Var channel_mean(const Var& a) {
    const Shape s = a.shape();
    const std::size_t plane = s.plane();
    Tensor out(Shape{s.n, 1, s.h, s.w});
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const double* p = a.value().data() + (static_cast<std::size_t>(n) * s.c + c) * plane;
            double* o = out.data() + n * plane;
            for (std::size_t i = 0; i < plane; ++i) o[i] += p[i] / s.c;
        }
    }
    return make_result(std::move(out), {a}, [s, plane](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            for (int n = 0; n < s.n; ++n) {
                const double* go = self.grad.data() + n * plane;
                for (int c = 0; c < s.c; ++c) {
                    double* p = g->data() + (static_cast<std::size_t>(n) * s.c + c) * plane;
                    for (std::size_t i = 0; i < plane; ++i) p[i] += go[i] / s.c;
                }
            }
        }
    });
}

Var avg_pool(const Var& a, int k) {
    const Shape s = a.shape();
    require(k >= 1 && s.h >= k && s.w >= k, ErrorCode::Shape,
            "avg_pool: window " + std::to_string(k) + " exceeds input " + s.str());
    const Shape os{s.n, s.c, s.h / k, s.w / k};
    Tensor out(os);
    const double inv = 1.0 / (k * k);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < os.h; ++y)
                for (int x = 0; x < os.w; ++x) {
                    double acc = 0.0;
                    for (int dy = 0; dy < k; ++dy)
                        for (int dx = 0; dx < k; ++dx) acc += a.value().at(n, c, y * k + dy, x * k + dx);
                    out.at(n, c, y, x) = acc * inv;
                }
    return make_result(std::move(out), {a}, [k, os, inv](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) {
                        const double v = self.grad.at(n, c, y, x) * inv;
                        for (int dy = 0; dy < k; ++dy)
                            for (int dx = 0; dx < k; ++dx) g->at(n, c, y * k + dy, x * k + dx) += v;
                    }
    });
}

Var max_pool2(const Var& a) {
    const Shape s = a.shape();
    require(s.h >= 2 && s.w >= 2, ErrorCode::Shape, "max_pool2: input " + s.str() + " too small");
    const Shape os{s.n, s.c, s.h / 2, s.w / 2};
    Tensor out(os);
    std::vector<std::size_t> argmax(os.numel());
    const Tensor& v = a.value();
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < os.h; ++y)
                for (int x = 0; x < os.w; ++x) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            const std::size_t idx =
                                ((static_cast<std::size_t>(n) * s.c + c) * s.h + 2 * y + dy) * s.w + 2 * x + dx;
                            if (v[idx] > best) {
                                best = v[idx];
                                best_idx = idx;
                            }
                        }
                    const std::size_t o = ((static_cast<std::size_t>(n) * os.c + c) * os.h + y) * os.w + x;
                    out[o] = best;
                    argmax[o] = best_idx;
                }
    return make_result(std::move(out), {a}, [argmax = std::move(argmax)](Node& self) {
        if (Tensor* g = parent_grad(self, 0)) {
            for (std::size_t o = 0; o < argmax.size(); ++o) (*g)[argmax[o]] += self.grad[o];
        }
    });
}

std::vector<BilinearTap> bilinear_taps(int in_size, int out_size) {
    std::vector<BilinearTap> taps(out_size);
    const double ratio = static_cast<double>(in_size) / out_size;
    for (int o = 0; o < out_size; ++o) {
        double src = (o + 0.5) * ratio - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
        const int i0 = static_cast<int>(std::floor(src));
        const int i1 = std::min(i0 + 1, in_size - 1);
        const double t = src - i0;
        taps[o] = BilinearTap{i0, i1, 1.0 - t, t};
    }
    return taps;
}

Var upsample_bilinear(const Var& a, int out_h, int out_w) {
    const Shape s = a.shape();
    const Shape os{s.n, s.c, out_h, out_w};
    const auto ty = bilinear_taps(s.h, out_h);
    const auto tx = bilinear_taps(s.w, out_w);
    Tensor out(os);
    const Tensor& v = a.value();
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < out_h; ++y) {
                const auto& ry = ty[y];
                for (int x = 0; x < out_w; ++x) {
                    const auto& rx = tx[x];
                    out.at(n, c, y, x) = ry.w0 * (rx.w0 * v.at(n, c, ry.i0, rx.i0) + rx.w1 * v.at(n, c, ry.i0, rx.i1)) +
                                         ry.w1 * (rx.w0 * v.at(n, c, ry.i1, rx.i0) + rx.w1 * v.at(n, c, ry.i1, rx.i1));
                }
            }
    return make_result(std::move(out), {a}, [ty, tx, os](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y) {
                    const auto& ry = ty[y];
                    for (int x = 0; x < os.w; ++x) {
                        const auto& rx = tx[x];
                        const double gv = self.grad.at(n, c, y, x);
                        g->at(n, c, ry.i0, rx.i0) += gv * ry.w0 * rx.w0;
                        g->at(n, c, ry.i0, rx.i1) += gv * ry.w0 * rx.w1;
                        g->at(n, c, ry.i1, rx.i0) += gv * ry.w1 * rx.w0;
                        g->at(n, c, ry.i1, rx.i1) += gv * ry.w1 * rx.w1;
                    }
                }
    });
}

Var concat_channels(const std::vector<Var>& parts) {
    require(!parts.empty(), ErrorCode::Shape, "concat_channels: no inputs");
    const Shape s0 = parts.front().shape();
    int channels = 0;
    for (const auto& p : parts) {
        const Shape s = p.shape();
        require(s.n == s0.n && s.h == s0.h && s.w == s0.w, ErrorCode::Shape,
                "concat_channels: spatial mismatch " + s.str() + " vs " + s0.str());
        channels += s.c;
    }
    const Shape os{s0.n, channels, s0.h, s0.w};
    const std::size_t plane = s0.plane();
    Tensor out(os);
    std::vector<int> offsets;
    int offset = 0;
    for (const auto& p : parts) {
        offsets.push_back(offset);
        const int c = p.shape().c;
        for (int n = 0; n < s0.n; ++n) {
            std::copy_n(p.value().data() + static_cast<std::size_t>(n) * c * plane, c * plane,
                        out.data() + (static_cast<std::size_t>(n) * channels + offset) * plane);
        }
        offset += c;
    }
    return make_result(std::move(out), parts, [offsets, os, plane](Node& self) {
        for (std::size_t i = 0; i < self.parents.size(); ++i) {
            Tensor* g = parent_grad(self, i);
            if (!g) continue;
            const int c = self.parents[i]->value.shape().c;
            for (int n = 0; n < os.n; ++n) {
                const double* src = self.grad.data() + (static_cast<std::size_t>(n) * os.c + offsets[i]) * plane;
                double* dst = g->data() + static_cast<std::size_t>(n) * c * plane;
                for (std::size_t k = 0; k < c * plane; ++k) dst[k] += src[k];
            }
        }
    });
}

Var diff_x(const Var& a) {
    const Shape s = a.shape();
    require(s.w >= 2, ErrorCode::Shape, "diff_x: width < 2");
    const Shape os{s.n, s.c, s.h, s.w - 1};
    Tensor out(os);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < s.h; ++y)
                for (int x = 0; x + 1 < s.w; ++x)
                    out.at(n, c, y, x) = a.value().at(n, c, y, x + 1) - a.value().at(n, c, y, x);
    return make_result(std::move(out), {a}, [os](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) {
                        const double v = self.grad.at(n, c, y, x);
                        g->at(n, c, y, x + 1) += v;
                        g->at(n, c, y, x) -= v;
                    }
    });
}

Var diff_y(const Var& a) {
    const Shape s = a.shape();
    require(s.h >= 2, ErrorCode::Shape, "diff_y: height < 2");
    const Shape os{s.n, s.c, s.h - 1, s.w};
    Tensor out(os);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y + 1 < s.h; ++y)
                for (int x = 0; x < s.w; ++x)
                    out.at(n, c, y, x) = a.value().at(n, c, y + 1, x) - a.value().at(n, c, y, x);
    return make_result(std::move(out), {a}, [os](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) {
                        const double v = self.grad.at(n, c, y, x);
                        g->at(n, c, y + 1, x) += v;
                        g->at(n, c, y, x) -= v;
                    }
    });
}

Var crop(const Var& a, int y0, int x0, int h, int w) {
    const Shape s = a.shape();
    require(y0 >= 0 && x0 >= 0 && h >= 1 && w >= 1 && y0 + h <= s.h && x0 + w <= s.w, ErrorCode::Shape,
            "crop window outside " + s.str());
    const Shape os{s.n, s.c, h, w};
    Tensor out(os);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) out.at(n, c, y, x) = a.value().at(n, c, y0 + y, x0 + x);
    return make_result(std::move(out), {a}, [os, y0, x0](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) g->at(n, c, y0 + y, x0 + x) += self.grad.at(n, c, y, x);
    });
}

Var pad_replicate(const Var& a, int pad) {
    require(pad >= 0, ErrorCode::InvalidArgument, "pad_replicate: negative padding");
    const Shape s = a.shape();
    const Shape os{s.n, s.c, s.h + 2 * pad, s.w + 2 * pad};
    auto src = [pad](int i, int n) { return std::clamp(i - pad, 0, n - 1); };
    Tensor out(os);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < os.h; ++y)
                for (int x = 0; x < os.w; ++x) out.at(n, c, y, x) = a.value().at(n, c, src(y, s.h), src(x, s.w));
    return make_result(std::move(out), {a}, [s, os, src](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) g->at(n, c, src(y, s.h), src(x, s.w)) += self.grad.at(n, c, y, x);
    });
}

Var depthwise_filter(const Var& a, const Tensor& kernel, int pad) {
    const Shape s = a.shape();
    const int k = kernel.shape().h;
    require(kernel.shape().w == k, ErrorCode::Shape, "depthwise_filter: kernel must be square");
    const int oh = s.h + 2 * pad - k + 1;
    const int ow = s.w + 2 * pad - k + 1;
    require(oh >= 1 && ow >= 1, ErrorCode::Shape,
            "depthwise_filter: " + std::to_string(k) + "x" + std::to_string(k) + " window exceeds input " +
                s.str());
    const Shape os{s.n, s.c, oh, ow};
    Tensor out(os);
    const Tensor& v = a.value();
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x) {
                    double acc = 0.0;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = y + ky - pad;
                        if (iy < 0 || iy >= s.h) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = x + kx - pad;
                            if (ix < 0 || ix >= s.w) continue;
                            acc += kernel[ky * k + kx] * v.at(n, c, iy, ix);
                        }
                    }
                    out.at(n, c, y, x) = acc;
                }
    return make_result(std::move(out), {a}, [kernel, s, os, k, pad](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) {
                        const double gv = self.grad.at(n, c, y, x);
                        for (int ky = 0; ky < k; ++ky) {
                            const int iy = y + ky - pad;
                            if (iy < 0 || iy >= s.h) continue;
                            for (int kx = 0; kx < k; ++kx) {
                                const int ix = x + kx - pad;
                                if (ix < 0 || ix >= s.w) continue;
                                g->at(n, c, iy, ix) += gv * kernel[ky * k + kx];
                            }
                        }
                    }
    });
}

namespace {

void softmax_inplace(double* p, std::size_t count, std::size_t stride) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) mx = std::max(mx, p[i * stride]);
    double z = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        p[i * stride] = std::exp(p[i * stride] - mx);
        z += p[i * stride];
    }
    for (std::size_t i = 0; i < count; ++i) p[i * stride] /= z;
}

// d softmax: gx_i = y_i * (gy_i - sum_j gy_j y_j)
void softmax_backward(const double* y, const double* gy, double* gx, std::size_t count,
                      std::size_t stride) {
    double dot = 0.0;
    for (std::size_t i = 0; i < count; ++i) dot += gy[i * stride] * y[i * stride];
    for (std::size_t i = 0; i < count; ++i) gx[i * stride] += y[i * stride] * (gy[i * stride] - dot);
}

} // namespace

Var softmax_spatial(const Var& a) {
    const Shape s = a.shape();
    const std::size_t plane = s.plane();
    Tensor out = a.value();
    for (std::size_t k = 0; k < static_cast<std::size_t>(s.n) * s.c; ++k)
        softmax_inplace(out.data() + k * plane, plane, 1);
    return make_result(std::move(out), {a}, [s, plane](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (std::size_t k = 0; k < static_cast<std::size_t>(s.n) * s.c; ++k)
            softmax_backward(self.value.data() + k * plane, self.grad.data() + k * plane,
                             g->data() + k * plane, plane, 1);
    });
}

Var softmax_channels(const Var& a) {
    const Shape s = a.shape();
    const std::size_t plane = s.plane();
    Tensor out = a.value();
    for (int n = 0; n < s.n; ++n)
        for (std::size_t i = 0; i < plane; ++i)
            softmax_inplace(out.data() + static_cast<std::size_t>(n) * s.c * plane + i, s.c, plane);
    return make_result(std::move(out), {a}, [s, plane](Node& self) {
        Tensor* g = parent_grad(self, 0);
        if (!g) return;
        for (int n = 0; n < s.n; ++n)
            for (std::size_t i = 0; i < plane; ++i) {
                const std::size_t base = static_cast<std::size_t>(n) * s.c * plane + i;
                softmax_backward(self.value.data() + base, self.grad.data() + base, g->data() + base, s.c,
                                 plane);
            }
    });
}

Var mul_channelwise(const Var& x, const Var& a) {
    const Shape s = x.shape();
    require(a.shape() == (Shape{s.n, s.c, 1, 1}), ErrorCode::Shape,
            "mul_channelwise: weights " + a.shape().str() + " do not match " + s.str());
    const std::size_t plane = s.plane();
    Tensor out(s);
    for (std::size_t k = 0; k < static_cast<std::size_t>(s.n) * s.c; ++k) {
        const double w = a.value()[k];
        for (std::size_t i = 0; i < plane; ++i) out[k * plane + i] = x.value()[k * plane + i] * w;
    }
    return make_result(std::move(out), {x, a}, [s, plane](Node& self) {
        const Tensor& xv = parent_value(self, 0);
        const Tensor& av = parent_value(self, 1);
        Tensor* gx = parent_grad(self, 0);
        Tensor* ga = parent_grad(self, 1);
        for (std::size_t k = 0; k < static_cast<std::size_t>(s.n) * s.c; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < plane; ++i) {
                const double gv = self.grad[k * plane + i];
                if (gx) (*gx)[k * plane + i] += gv * av[k];
                acc += gv * xv[k * plane + i];
            }
            if (ga) (*ga)[k] += acc;
        }
    });
}

Var mul_spatialwise(const Var& x, const Var& a) {
    const Shape s = x.shape();
    require(a.shape() == (Shape{s.n, 1, s.h, s.w}), ErrorCode::Shape,
            "mul_spatialwise: map " + a.shape().str() + " does not match " + s.str());
    const std::size_t plane = s.plane();
    Tensor out(s);
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c) {
            const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) out[base + i] = x.value()[base + i] * a.value()[n * plane + i];
        }
    return make_result(std::move(out), {x, a}, [s, plane](Node& self) {
        const Tensor& xv = parent_value(self, 0);
        const Tensor& av = parent_value(self, 1);
        Tensor* gx = parent_grad(self, 0);
        Tensor* ga = parent_grad(self, 1);
        for (int n = 0; n < s.n; ++n)
            for (int c = 0; c < s.c; ++c) {
                const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    const double gv = self.grad[base + i];
                    if (gx) (*gx)[base + i] += gv * av[n * plane + i];
                    if (ga) (*ga)[n * plane + i] += gv * xv[base + i];
                }
            }
    });
}

Var spatial_weighted_sum(const Var& v, const Var& p) {
    const Shape s = v.shape();
    require(p.shape() == (Shape{s.n, 1, s.h, s.w}), ErrorCode::Shape,
            "spatial_weighted_sum: weights " + p.shape().str() + " do not match " + s.str());
    const std::size_t plane = s.plane();
    Tensor out(Shape{s.n, s.c, 1, 1});
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c) {
            const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
            double acc = 0.0;
            for (std::size_t i = 0; i < plane; ++i) acc += v.value()[base + i] * p.value()[n * plane + i];
            out[static_cast<std::size_t>(n) * s.c + c] = acc;
        }
    return make_result(std::move(out), {v, p}, [s, plane](Node& self) {
        const Tensor& vv = parent_value(self, 0);
        const Tensor& pv = parent_value(self, 1);
        Tensor* gv = parent_grad(self, 0);
        Tensor* gp = parent_grad(self, 1);
        for (int n = 0; n < s.n; ++n)
            for (int c = 0; c < s.c; ++c) {
                const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
                const double go = self.grad[static_cast<std::size_t>(n) * s.c + c];
                for (std::size_t i = 0; i < plane; ++i) {
                    if (gv) (*gv)[base + i] += go * pv[n * plane + i];
                    if (gp) (*gp)[n * plane + i] += go * vv[base + i];
                }
            }
    });
}

Var channel_weighted_sum(const Var& v, const Var& p) {
    const Shape s = v.shape();
    require(p.shape() == (Shape{s.n, s.c, 1, 1}), ErrorCode::Shape,
            "channel_weighted_sum: weights " + p.shape().str() + " do not match " + s.str());
    const std::size_t plane = s.plane();
    Tensor out(Shape{s.n, 1, s.h, s.w});
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c) {
            const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
            const double w = p.value()[static_cast<std::size_t>(n) * s.c + c];
            for (std::size_t i = 0; i < plane; ++i) out[n * plane + i] += w * v.value()[base + i];
        }
    return make_result(std::move(out), {v, p}, [s, plane](Node& self) {
        const Tensor& vv = parent_value(self, 0);
        const Tensor& pv = parent_value(self, 1);
        Tensor* gv = parent_grad(self, 0);
        Tensor* gp = parent_grad(self, 1);
        for (int n = 0; n < s.n; ++n)
            for (int c = 0; c < s.c; ++c) {
                const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * plane;
                const std::size_t k = static_cast<std::size_t>(n) * s.c + c;
                double acc = 0.0;
                for (std::size_t i = 0; i < plane; ++i) {
                    const double go = self.grad[n * plane + i];
                    if (gv) (*gv)[base + i] += go * pv[k];
                    acc += go * vv[base + i];
                }
                if (gp) (*gp)[k] += acc;
            }
    });
}

} // namespace darktext::nn
