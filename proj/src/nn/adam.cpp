#include "nn/adam.hpp"

#include <cmath>

namespace darktext::nn {

void Adam::step(ParameterStore& params, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (const auto& [name, param] : params.entries()) {
        Var p = param;
        const Tensor& g = p.grad();
        auto& m = m_[name];
        auto& v = v_[name];
        if (m.size() != g.size()) m = Tensor(g.shape(), 0.0);
        if (v.size() != g.size()) v = Tensor(g.shape(), 0.0);
        Tensor& value = p.mutable_value();
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            value[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

} // namespace darktext::nn
