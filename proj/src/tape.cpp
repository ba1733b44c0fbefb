#include "dicausal/tape.hpp"

#include <cmath>

#include "dicausal/errors.hpp"

namespace dicausal {
namespace {

void accumulate(Tensor& into, const Tensor& delta) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += delta[i];
}

}  // namespace

VarId Tape::push(Node n) {
  for (VarId in : n.inputs) {
    if (in >= nodes_.size()) throw Error("tape: input id " + std::to_string(in) + " not recorded");
    n.needs_grad = n.needs_grad || nodes_[in].needs_grad;
  }
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

VarId Tape::constant(Tensor value) {
  return push(Node{.op = Op::constant, .value = std::move(value)});
}

VarId Tape::parameter(Tensor value, std::size_t slot) {
  return push(Node{.op = Op::parameter, .value = std::move(value), .needs_grad = true, .slot = slot});
}

VarId Tape::linear(VarId input, VarId weight, VarId bias) {
  Tensor out = dicausal::linear(node(input).value, node(weight).value, node(bias).value);
  return push(Node{.op = Op::linear, .inputs = {input, weight, bias}, .value = std::move(out)});
}

VarId Tape::sigmoid(VarId x) {
  return push(Node{.op = Op::sigmoid, .inputs = {x}, .value = dicausal::sigmoid(node(x).value)});
}

VarId Tape::tanh(VarId x) {
  return push(Node{.op = Op::tanh, .inputs = {x}, .value = dicausal::tanh(node(x).value)});
}

VarId Tape::negate(VarId x) {
  return push(Node{.op = Op::negate, .inputs = {x}, .value = dicausal::negate(node(x).value)});
}

VarId Tape::scale(VarId x, double factor) {
  return push(Node{.op = Op::scale,
                   .inputs = {x},
                   .value = dicausal::scale(node(x).value, factor),
                   .factor = factor});
}

VarId Tape::add(VarId a, VarId b) {
  return push(Node{.op = Op::add,
                   .inputs = {a, b},
                   .value = elementwise(ElementwiseOp::add, node(a).value, node(b).value)});
}

VarId Tape::mul(VarId a, VarId b) {
  return push(Node{.op = Op::mul,
                   .inputs = {a, b},
                   .value = elementwise(ElementwiseOp::mul, node(a).value, node(b).value)});
}

VarId Tape::gather_rows(VarId x, std::vector<std::size_t> rows) {
  Tensor out = dicausal::gather_rows(node(x).value, rows);
  return push(Node{.op = Op::gather_rows, .inputs = {x}, .value = std::move(out), .rows = std::move(rows)});
}

VarId Tape::reshape(VarId x, Shape shape) {
  return push(Node{.op = Op::reshape, .inputs = {x}, .value = node(x).value.reshaped(std::move(shape))});
}

VarId Tape::cross_entropy(VarId logits, std::vector<int> labels) {
  const Tensor& in = node(logits).value;
  const double loss = softmax_cross_entropy(in, labels);
  return push(Node{.op = Op::cross_entropy,
                   .inputs = {logits},
                   .value = Tensor({1}, {loss}),
                   .labels = std::move(labels),
                   .saved = softmax_rows(in)});
}

void Tape::backward(VarId root) {
  if (root >= nodes_.size()) throw Error("tape: backward from unrecorded id");
  if (node(root).value.size() != 1) {
    throw DimensionError("tape: backward root must be scalar, got " +
                         shape_to_string(node(root).value.shape()));
  }
  grads_.assign(nodes_.size(), Tensor());
  backward_order_.clear();
  grads_[root] = Tensor(node(root).value.shape(), 1.0);

  auto grad_of = [this](VarId id) -> Tensor& {
    if (grads_[id].empty() && !nodes_[id].value.empty()) grads_[id] = Tensor(nodes_[id].value.shape());
    return grads_[id];
  };

  for (VarId id = root + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.needs_grad || grads_[id].empty()) continue;
    backward_order_.push_back(id);
    const Tensor& upstream = grads_[id];

    switch (n.op) {
      case Op::constant:
      case Op::parameter:
        break;
      case Op::linear: {
        const Tensor& x = node(n.inputs[0]).value;
        const Tensor& w = node(n.inputs[1]).value;
        const std::size_t batch = x.dim(0), in = x.dim(1), out = w.dim(1);
        if (node(n.inputs[0]).needs_grad) {
          Tensor& gx = grad_of(n.inputs[0]);
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t d = 0; d < in; ++d) {
              double acc = 0.0;
              for (std::size_t k = 0; k < out; ++k) acc += upstream.at(b, k) * w.at(d, k);
              gx.at(b, d) += acc;
            }
          }
        }
        if (node(n.inputs[1]).needs_grad) {
          Tensor& gw = grad_of(n.inputs[1]);
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t d = 0; d < in; ++d) {
              const double xv = x.at(b, d);
              for (std::size_t k = 0; k < out; ++k) gw.at(d, k) += xv * upstream.at(b, k);
            }
          }
        }
        if (node(n.inputs[2]).needs_grad) {
          Tensor& gb = grad_of(n.inputs[2]);
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t k = 0; k < out; ++k) gb[k] += upstream.at(b, k);
          }
        }
        break;
      }
      case Op::sigmoid: {
        Tensor& gx = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < n.value.size(); ++i) {
          const double s = n.value[i];
          gx[i] += upstream[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::tanh: {
        Tensor& gx = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < n.value.size(); ++i) {
          const double t = n.value[i];
          gx[i] += upstream[i] * (1.0 - t * t);
        }
        break;
      }
      case Op::negate: {
        Tensor& gx = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < upstream.size(); ++i) gx[i] -= upstream[i];
        break;
      }
      case Op::scale: {
        Tensor& gx = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < upstream.size(); ++i) gx[i] += n.factor * upstream[i];
        break;
      }
      case Op::add:
        for (VarId in : n.inputs) {
          if (node(in).needs_grad) accumulate(grad_of(in), upstream);
        }
        break;
      case Op::mul: {
        const VarId a = n.inputs[0], b = n.inputs[1];
        const Tensor& av = node(a).value;
        const Tensor& bv = node(b).value;
        if (node(a).needs_grad) {
          Tensor& ga = grad_of(a);
          for (std::size_t i = 0; i < upstream.size(); ++i) ga[i] += upstream[i] * bv[i];
        }
        if (node(b).needs_grad) {
          Tensor& gb = grad_of(b);
          for (std::size_t i = 0; i < upstream.size(); ++i) gb[i] += upstream[i] * av[i];
        }
        break;
      }
      case Op::gather_rows: {
        Tensor& gx = grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < n.rows.size(); ++r) {
          auto dst = gx.row(n.rows[r]);
          const auto src = upstream.row(r);
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
        break;
      }
      case Op::reshape: {
        Tensor& gx = grad_of(n.inputs[0]);
        accumulate(gx, upstream);
        break;
      }
      case Op::cross_entropy: {
        Tensor& gl = grad_of(n.inputs[0]);
        const std::size_t batch = n.saved.dim(0), classes = n.saved.dim(1);
        const double g = upstream[0] / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = static_cast<int>(c) == n.labels[b] ? 1.0 : 0.0;
            gl.at(b, c) += g * (n.saved.at(b, c) - onehot);
          }
        }
        break;
      }
    }
  }
}

Tensor Tape::grad(VarId id) const {
  if (id < grads_.size() && !grads_[id].empty()) return grads_[id];
  return Tensor(node(id).value.shape());
}

std::vector<Tensor> Tape::parameter_grads(std::size_t slot_count) const {
  std::vector<Tensor> out(slot_count);
  for (VarId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.op != Op::parameter || !n.slot || *n.slot >= slot_count) continue;
    const Tensor g = grad(id);
    if (out[*n.slot].empty()) {
      out[*n.slot] = g;
    } else {
      accumulate(out[*n.slot], g);
    }
  }
  return out;
}

}  // namespace dicausal
