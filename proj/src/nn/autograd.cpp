#include "nn/autograd.hpp"

#include "core/error.hpp"

#include <unordered_set>

namespace darktext::nn {

Tensor& Node::grad_buffer() {
    if (grad.size() != value.size()) grad = Tensor(value.shape(), 0.0);
    return grad;
}

Var Var::constant(Tensor value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    return Var(std::move(node));
}

Var Var::parameter(Tensor value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = true;
    return Var(std::move(node));
}

const Tensor& Var::grad() const { return node_->grad_buffer(); }

void Var::zero_grad() {
    if (node_ && node_->grad.size() > 0) node_->grad.fill(0.0);
}

double Var::item() const {
    require(node_ && node_->value.size() == 1, ErrorCode::Shape, "item() on a non-scalar value");
    return node_->value[0];
}

namespace {

void attach(Node& node, Tensor value, auto begin, auto end, std::function<void(Node&)> fn) {
    node.value = std::move(value);
    for (auto it = begin; it != end; ++it) {
        if (it->requires_grad()) node.requires_grad = true;
    }
    if (node.requires_grad) {
        for (auto it = begin; it != end; ++it) node.parents.push_back(it->node());
        node.backward = std::move(fn);
    }
}

} // namespace

Var make_result(Tensor value, std::initializer_list<Var> parents,
                std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    attach(*node, std::move(value), parents.begin(), parents.end(), std::move(backward_fn));
    return Var(std::move(node));
}

Var make_result(Tensor value, const std::vector<Var>& parents,
                std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    attach(*node, std::move(value), parents.begin(), parents.end(), std::move(backward_fn));
    return Var(std::move(node));
}

void backward(const Var& root) {
    require(root.valid() && root.value().size() == 1, ErrorCode::Shape,
            "backward() requires a single-element root");
    if (!root.requires_grad()) return;

    // Iterative post-order DFS: parents precede children in `order`.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.node().get(), 0);
    visited.insert(root.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second) {
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root.node()->grad_buffer()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backward && node->grad.size() == node->value.size()) node->backward(*node);
    }
}

} // namespace darktext::nn
