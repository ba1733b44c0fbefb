#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dicausal {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

// Dense row-major double tensor with value semantics.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // 2-D element access.
  double& at(std::size_t row, std::size_t col) { return values_[row * shape_[1] + col]; }
  const double& at(std::size_t row, std::size_t col) const { return values_[row * shape_[1] + col]; }

  std::span<const double> row(std::size_t r) const;
  std::span<double> row(std::size_t r);

  Tensor reshaped(Shape shape) const;
  bool all_finite() const;
  void fill(double value);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Byte-level equality of shape and payload (distinguishes -0.0 from 0.0).
bool bitwise_equal(const Tensor& a, const Tensor& b);

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace dicausal
