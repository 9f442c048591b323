#pragma once

#include "nn/autograd.hpp"

#include <map>
#include <random>
#include <string>

namespace darktext::nn {

using Rng = std::mt19937_64;

// Named parameters in lexicographic order; the order is what checkpoints and
// the optimizer iterate over.
class ParameterStore {
public:
    Var& add(const std::string& name, Tensor initial);
    const Var& get(const std::string& name) const;
    bool contains(const std::string& name) const { return params_.count(name) != 0; }

    const std::map<std::string, Var>& entries() const { return params_; }
    std::size_t count() const;   // scalar parameter count
    void zero_grad();

private:
    std::map<std::string, Var> params_;
};

enum class Init { HeUniform, Zero };

class Conv2d {
public:
    Conv2d() = default;
    Conv2d(ParameterStore& store, const std::string& name, int in_channels, int out_channels, int kernel,
           Rng& rng, Init init = Init::HeUniform, int stride = 1);

    Var operator()(const Var& x) const;

    const Var& weight() const { return weight_; }
    const Var& bias() const { return bias_; }
    int in_channels() const { return in_; }
    int out_channels() const { return out_; }

private:
    Var weight_;
    Var bias_;
    int in_ = 0;
    int out_ = 0;
    int kernel_ = 1;
    int stride_ = 1;
};

} // namespace darktext::nn
