#include "nn/layers.hpp"

#include "core/error.hpp"
#include "nn/ops.hpp"

#include <cmath>

namespace darktext::nn {

Var& ParameterStore::add(const std::string& name, Tensor initial) {
    require(!contains(name), ErrorCode::Config, "duplicate parameter name '" + name + "'");
    return params_.emplace(name, Var::parameter(std::move(initial))).first->second;
}

const Var& ParameterStore::get(const std::string& name) const {
    auto it = params_.find(name);
    require(it != params_.end(), ErrorCode::Config, "unknown parameter '" + name + "'");
    return it->second;
}

std::size_t ParameterStore::count() const {
    std::size_t total = 0;
    for (const auto& [_, v] : params_) total += v.value().size();
    return total;
}

void ParameterStore::zero_grad() {
    for (auto& [_, v] : params_) v.zero_grad();
}

Conv2d::Conv2d(ParameterStore& store, const std::string& name, int in_channels, int out_channels, int kernel,
               Rng& rng, Init init, int stride)
    : in_(in_channels), out_(out_channels), kernel_(kernel), stride_(stride) {
    Tensor w(Shape{out_channels, in_channels, kernel, kernel});
    Tensor b(Shape{1, out_channels, 1, 1});
    if (init == Init::HeUniform) {
        const double fan_in = static_cast<double>(in_channels) * kernel * kernel;
        const double bound = std::sqrt(6.0 / fan_in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : w.values()) v = dist(rng);
        std::uniform_real_distribution<double> bias_dist(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
        for (auto& v : b.values()) v = bias_dist(rng);
    }
    weight_ = store.add(name + ".weight", std::move(w));
    bias_ = store.add(name + ".bias", std::move(b));
}

Var Conv2d::operator()(const Var& x) const { return conv2d(x, weight_, bias_, stride_, kernel_ / 2); }

} // namespace darktext::nn
