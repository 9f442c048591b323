#pragma once

#include "nn/layers.hpp"

#include <map>
#include <string>

namespace darktext::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction; moments are keyed by parameter name so they
// round-trip through checkpoints.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void step(ParameterStore& params, double lr);

    const AdamConfig& config() const { return cfg_; }
    long long steps() const { return t_; }
    void set_steps(long long t) { t_ = t; }
    std::map<std::string, Tensor>& first_moments() { return m_; }
    std::map<std::string, Tensor>& second_moments() { return v_; }
    const std::map<std::string, Tensor>& first_moments() const { return m_; }
    const std::map<std::string, Tensor>& second_moments() const { return v_; }

private:
    AdamConfig cfg_;
    long long t_ = 0;
    std::map<std::string, Tensor> m_;
    std::map<std::string, Tensor> v_;
};

} // namespace darktext::nn
