#include "nn/tensor.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <numeric>

namespace darktext::nn {

std::string Shape::str() const {
    return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
    require(data_.size() == shape_.numel(), ErrorCode::Shape,
            "tensor storage of " + std::to_string(data_.size()) + " values does not match shape " +
                shape_.str());
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
    if (!(a == b)) {
        fail(ErrorCode::Shape, std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
    }
}

} // namespace darktext::nn
