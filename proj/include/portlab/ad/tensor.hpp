#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "portlab/errors.hpp"

namespace portlab::ad {

// dense row-major double tensor, rank 0..3
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    v_.assign(size_t(checked_count(shape_)), 0.0);
  }

  Tensor(std::vector<int> shape, std::vector<double> values) : shape_(std::move(shape)), v_(std::move(values)) {
    if (int64_t(v_.size()) != checked_count(shape_))
      throw structural_error("tensor value count does not match shape");
  }

  static Tensor scalar(double x) { return Tensor({1}, {x}); }
  static Tensor vec(std::vector<double> values) {
    int n = int(values.size());
    return Tensor({n}, std::move(values));
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return int(shape_.size()); }
  int dim(int i) const { return shape_[size_t(i)]; }
  int size() const { return int(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](int i) { return v_[size_t(i)]; }
  double operator[](int i) const { return v_[size_t(i)]; }

  double& at2(int i, int j) { return v_[size_t(i * shape_[1] + j)]; }
  double at2(int i, int j) const { return v_[size_t(i * shape_[1] + j)]; }
  double& at3(int c, int i, int j) { return v_[size_t((c * shape_[1] + i) * shape_[2] + j)]; }
  double at3(int c, int i, int j) const { return v_[size_t((c * shape_[1] + i) * shape_[2] + j)]; }

  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  static std::string shape_str(const std::vector<int>& s) {
    std::string out = "(";
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + ")";
  }

 private:
  static int64_t checked_count(const std::vector<int>& shape) {
    if (shape.size() > 3) throw structural_error("tensor rank above 3 is not supported");
    int64_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw structural_error("tensor dimension must be positive, got shape " + shape_str(shape));
      n *= d;
    }
    return n;
  }

  std::vector<int> shape_;
  std::vector<double> v_;
};

}  // namespace portlab::ad
