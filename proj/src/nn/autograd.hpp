#pragma once

#include "nn/tensor.hpp"

#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

namespace darktext::nn {

struct Node {
    Tensor value;
    Tensor grad; // allocated on first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads `self.grad` and accumulates into the parents' gradients.
    std::function<void(Node& self)> backward;

    Tensor& grad_buffer();
};

// Reverse-mode handle onto a graph node. Copies share the node.
class Var {
public:
    Var() = default;

    static Var constant(Tensor value);
    static Var parameter(Tensor value);

    bool valid() const { return static_cast<bool>(node_); }
    const Tensor& value() const { return node_->value; }
    Tensor& mutable_value() { return node_->value; }
    const Shape& shape() const { return node_->value.shape(); }
    bool requires_grad() const { return node_ && node_->requires_grad; }

    // Gradient accumulated by backward(); zero tensor when none has flowed.
    const Tensor& grad() const;
    void zero_grad();

    double item() const;

    const std::shared_ptr<Node>& node() const { return node_; }

private:
    explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}
    friend Var make_result(Tensor value, std::initializer_list<Var> parents,
                           std::function<void(Node&)> backward);
    friend Var make_result(Tensor value, const std::vector<Var>& parents,
                           std::function<void(Node&)> backward);

    std::shared_ptr<Node> node_;
};

// Builds an op output. The backward closure is dropped when no parent needs
// gradients, so inference graphs hold no history.
Var make_result(Tensor value, std::initializer_list<Var> parents,
                std::function<void(Node&)> backward);
Var make_result(Tensor value, const std::vector<Var>& parents,
                std::function<void(Node&)> backward);

// Seeds d(root)/d(root) = 1 for a single-element root and propagates.
void backward(const Var& root);

} // namespace darktext::nn
