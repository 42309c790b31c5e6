#pragma once

#include <cblas.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "npode/errors.hpp"

namespace npode::ad {

using Shape = std::vector<long>;

inline long numel_of(const Shape& s) {
  long n = 1;
  for (long d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

// Dense row-major 64-bit tensor. Values are shared so that a Tensor recorded
// on a Tape and the Tape's own node can alias the same storage; a Tensor that
// carries a node id is treated as immutable from then on.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)),
        data_(std::make_shared<std::vector<double>>(numel_of(shape_), 0.0)) {}
  Tensor(Shape shape, std::vector<double> values)
      : shape_(std::move(shape)),
        data_(std::make_shared<std::vector<double>>(std::move(values))) {
    if (numel_of(shape_) != static_cast<long>(data_->size()))
      throw DimensionError("tensor shape " + shape_str(shape_) + " does not match " +
                           std::to_string(data_->size()) + " values");
  }
  Tensor(Shape shape, std::initializer_list<double> values)
      : Tensor(std::move(shape), std::vector<double>(values)) {}
  Tensor(Shape shape, std::shared_ptr<std::vector<double>> values)
      : shape_(std::move(shape)), data_(std::move(values)) {}

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double v) {
    Tensor t(std::move(shape));
    std::fill(t.data_->begin(), t.data_->end(), v);
    return t;
  }
  static Tensor scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

  const Shape& shape() const { return shape_; }
  long rank() const { return static_cast<long>(shape_.size()); }
  long dim(long i) const { return shape_[i]; }
  long numel() const { return data_ ? static_cast<long>(data_->size()) : 0; }

  double* data() { return data_->data(); }
  const double* data() const { return data_->data(); }
  const std::shared_ptr<std::vector<double>>& storage() const { return data_; }
  std::vector<double>& values() { return *data_; }
  const std::vector<double>& values() const { return *data_; }

  double& operator[](long i) { return (*data_)[i]; }
  double operator[](long i) const { return (*data_)[i]; }
  double& at(long r, long c) { return (*data_)[r * shape_[1] + c]; }
  double at(long r, long c) const { return (*data_)[r * shape_[1] + c]; }

  bool is_scalar() const { return numel() == 1; }

  // Handle into the active tape; -1 marks a constant.
  int node = -1;

 private:
  Shape shape_;
  std::shared_ptr<std::vector<double>> data_;
};

// Row-major GEMM: C = alpha * op(A) * op(B) + beta * C.
inline void gemm(bool trans_a, bool trans_b, long m, long n, long k, double alpha,
                 const double* a, long lda, const double* b, long ldb, double beta,
                 double* c, long ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), alpha, a, static_cast<int>(lda),
              b, static_cast<int>(ldb), beta, c, static_cast<int>(ldc));
}

}  // namespace npode::ad
