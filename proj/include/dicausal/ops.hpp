#pragma once

// Forward kernels for the fixed layer set. Gradients live in tape.hpp.

#include <span>
#include <vector>

#include "dicausal/tensor.hpp"

namespace dicausal {

enum class ElementwiseOp { add, mul };

// out[b,k] = sum_d input[b,d] * weight[d,k] + bias[k]
Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

double sigmoid(double x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor negate(const Tensor& x);
Tensor scale(const Tensor& x, double factor);
Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b);

// Rows of a 2-D tensor selected (with repetition) by `rows`.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);

// Row-wise softmax of a B x C tensor, max-shifted.
Tensor softmax_rows(const Tensor& logits);

// Mean over the batch of -log softmax(logits)[label].
double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

// Argmax per row; ties go to the lowest index.
std::vector<int> argmax_rows(const Tensor& logits);

}  // namespace dicausal
