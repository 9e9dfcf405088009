// Shared scalar types, small dense containers, and error types used across
// the rasb library.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rasb {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kImaginaryUnit{0.0, 1.0};

// Dense rank-4 tensor with four equal extents, indexed (a, b, c, d) in
// row-major order.  Used for two-body integrals and two-body density
// matrices, which are small (extent = number of orbitals).
class Tensor4 {
 public:
  Tensor4() = default;

  explicit Tensor4(int extent)
      : extent_(extent),
        data_(static_cast<std::size_t>(extent) * extent * extent * extent,
              Complex(0.0, 0.0)) {
    if (extent < 0) {
      throw std::invalid_argument("Tensor4: extent must be nonnegative");
    }
  }

  int extent() const noexcept { return extent_; }

  Complex& operator()(int a, int b, int c, int d) {
    return data_[flat(a, b, c, d)];
  }
  const Complex& operator()(int a, int b, int c, int d) const {
    return data_[flat(a, b, c, d)];
  }

  void setZero() { std::fill(data_.begin(), data_.end(), Complex(0.0, 0.0)); }

  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }
  std::size_t size() const noexcept { return data_.size(); }

 private:
  std::size_t flat(int a, int b, int c, int d) const {
    const auto m = static_cast<std::size_t>(extent_);
    return ((static_cast<std::size_t>(a) * m + b) * m + c) * m + d;
  }

  int extent_ = 0;
  std::vector<Complex> data_;
};

// Thrown when an adaptive propagation cannot continue (step size underflow
// or a non-finite state).  Carries the last time that was reached with an
// accepted step.
class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

// Thrown when an input document (run configuration) fails validation.
// Carries the offending field path for user-facing diagnostics.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("field '" + field + "': " + message),
        field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace rasb
