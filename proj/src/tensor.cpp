#include "dicausal/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "dicausal/errors.hpp"

namespace dicausal {

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_size(shape_) != values_.size()) {
    throw DimensionError("tensor of shape " + shape_to_string(shape_) + " given " +
                         std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t cols = rows.size() ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged matrix literal");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(values));
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t width = values_.size() / shape_.at(0);
  return std::span<const double>(values_).subspan(r * width, width);
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t width = values_.size() / shape_.at(0);
  return std::span<double>(values_).subspan(r * width, width);
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != values_.size()) {
    throw DimensionError("cannot reshape " + shape_to_string(shape_) + " to " +
                         shape_to_string(shape));
  }
  return Tensor(std::move(shape), values_);
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("max_abs_diff: " + shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace dicausal
