#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dicausal/ops.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

using VarId = std::size_t;

// Reverse-mode recorder for the closed op set used by the model. Every op
// appends one node holding its output and whatever it needs for backward;
// backward() walks the nodes in exact reverse order of recording.
//
// A Tape is single-use and single-writer: build, call backward() once, read
// gradients.
class Tape {
 public:
  enum class Op {
    constant,
    parameter,
    linear,
    sigmoid,
    tanh,
    negate,
    scale,
    add,
    mul,
    gather_rows,
    reshape,
    cross_entropy,
  };

  // Input data that receives no gradient.
  VarId constant(Tensor value);
  // Trainable leaf; its gradient is reported under `slot`.
  VarId parameter(Tensor value, std::size_t slot);

  VarId linear(VarId input, VarId weight, VarId bias);
  VarId sigmoid(VarId x);
  VarId tanh(VarId x);
  VarId negate(VarId x);
  VarId scale(VarId x, double factor);
  VarId add(VarId a, VarId b);
  VarId mul(VarId a, VarId b);
  VarId gather_rows(VarId x, std::vector<std::size_t> rows);
  VarId reshape(VarId x, Shape shape);
  // Mean softmax cross-entropy; output has shape [1].
  VarId cross_entropy(VarId logits, std::vector<int> labels);

  const Tensor& value(VarId id) const { return nodes_.at(id).value; }
  double scalar(VarId id) const { return nodes_.at(id).value[0]; }

  // Seeds d(root)/d(root) = 1 and propagates to every node root depends on.
  void backward(VarId root);

  // Gradient of the last backward() root w.r.t. `id`; zeros if unreached.
  Tensor grad(VarId id) const;

  // One gradient per slot in [0, slot_count); slots never bound read as
  // empty tensors, slots bound but unreached as zeros.
  std::vector<Tensor> parameter_grads(std::size_t slot_count) const;

  std::size_t size() const { return nodes_.size(); }
  Op op(VarId id) const { return nodes_.at(id).op; }
  // Node ids in the order backward() processed them.
  const std::vector<VarId>& backward_order() const { return backward_order_; }

 private:
  struct Node {
    Op op = Op::constant;
    std::vector<VarId> inputs{};
    Tensor value{};
    bool needs_grad = false;
    double factor = 0.0;
    std::vector<std::size_t> rows{};
    std::vector<int> labels{};
    Tensor saved{};  // softmax probabilities for cross_entropy
    std::optional<std::size_t> slot{};
  };

  VarId push(Node node);
  const Node& node(VarId id) const { return nodes_.at(id); }

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<VarId> backward_order_;
};

}  // namespace dicausal
