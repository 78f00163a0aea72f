#pragma once

namespace nclab {

/// Kahan-compensated running sum. Works for double, std::complex<double> and
/// Eigen array expressions with value semantics.
template <class T>
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(T zero) : sum_(zero), comp_(zero) {}

  void add(const T& v) {
    const T y = v - comp_;
    const T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  const T& value() const noexcept { return sum_; }
  const T& compensation() const noexcept { return comp_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace nclab
