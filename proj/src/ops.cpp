#include "dicausal/ops.hpp"

#include <algorithm>
#include <cmath>

#include "dicausal/errors.hpp"

namespace dicausal {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return;
  for (std::size_t axis = 0; axis < std::max(a.rank(), b.rank()); ++axis) {
    const std::size_t da = axis < a.rank() ? a.dim(axis) : 0;
    const std::size_t db = axis < b.rank() ? b.dim(axis) : 0;
    if (da != db) {
      throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) + " differs (" +
                           std::to_string(da) + " vs " + std::to_string(db) + ")");
    }
  }
}

template <typename F>
Tensor map(const Tensor& x, F f) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return out;
}

}  // namespace

Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.rank() != 2) throw DimensionError("linear: input must be 2-D, got " + shape_to_string(input.shape()));
  if (weight.rank() != 2) throw DimensionError("linear: weight must be 2-D, got " + shape_to_string(weight.shape()));
  if (bias.rank() != 1) throw DimensionError("linear: bias must be 1-D, got " + shape_to_string(bias.shape()));
  const std::size_t batch = input.dim(0), in = input.dim(1), out = weight.dim(1);
  if (weight.dim(0) != in) {
    throw DimensionError("linear: input axis 1 (" + std::to_string(in) +
                         ") does not match weight axis 0 (" + std::to_string(weight.dim(0)) + ")");
  }
  if (bias.dim(0) != out) {
    throw DimensionError("linear: bias axis 0 (" + std::to_string(bias.dim(0)) +
                         ") does not match weight axis 1 (" + std::to_string(out) + ")");
  }
  Tensor result({batch, out});
  for (std::size_t b = 0; b < batch; ++b) {
    double* dst = &result.at(b, 0);
    for (std::size_t k = 0; k < out; ++k) dst[k] = bias[k];
    for (std::size_t d = 0; d < in; ++d) {
      const double x = input.at(b, d);
      const double* w = &weight.at(d, 0);
      for (std::size_t k = 0; k < out; ++k) dst[k] += x * w[k];
    }
  }
  return result;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) { return map(x, [](double v) { return sigmoid(v); }); }

Tensor tanh(const Tensor& x) { return map(x, [](double v) { return std::tanh(v); }); }

Tensor negate(const Tensor& x) { return map(x, [](double v) { return -v; }); }

Tensor scale(const Tensor& x, double factor) {
  return map(x, [factor](double v) { return factor * v; });
}

Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, op == ElementwiseOp::add ? "add" : "mul");
  Tensor out(a.shape());
  if (op == ElementwiseOp::add) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  }
  return out;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  if (x.rank() != 2) throw DimensionError("gather_rows: input must be 2-D");
  const std::size_t width = x.dim(1);
  Tensor out({rows.size(), width});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= x.dim(0)) {
      throw DimensionError("gather_rows: row " + std::to_string(rows[r]) + " out of range on axis 0");
    }
    const auto src = x.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  if (logits.rank() != 2) throw DimensionError("softmax: logits must be 2-D");
  Tensor out(logits.shape());
  for (std::size_t b = 0; b < logits.dim(0); ++b) {
    const auto in = logits.row(b);
    auto dst = out.row(b);
    double top = in[0];
    for (double v : in) top = std::max(top, v);
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - top);
      total += dst[c];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2) throw DimensionError("cross_entropy: logits must be 2-D");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (labels.size() != batch) {
    throw DimensionError("cross_entropy: axis 0 has " + std::to_string(batch) + " rows but " +
                         std::to_string(labels.size()) + " labels");
  }
  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const int label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw LabelError("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
    const auto in = logits.row(b);
    double top = in[0];
    for (double v : in) top = std::max(top, v);
    double total = 0.0;
    for (double v : in) total += std::exp(v - top);
    loss += std::log(total) - (in[label] - top);
  }
  return batch ? loss / static_cast<double>(batch) : 0.0;
}

std::vector<int> argmax_rows(const Tensor& logits) {
  std::vector<int> out(logits.dim(0));
  for (std::size_t b = 0; b < logits.dim(0); ++b) {
    const auto in = logits.row(b);
    std::size_t best = 0;
    for (std::size_t c = 1; c < in.size(); ++c) {
      if (in[c] > in[best]) best = c;
    }
    out[b] = static_cast<int>(best);
  }
  return out;
}

}  // namespace dicausal
