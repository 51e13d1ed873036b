#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rgflow {

/// Rising factorial (x)_n = x (x+1) ... (x+n-1); (x)_0 = 1.
double pochhammer(double x, int n);

/// ln|(x)_n| and the sign of (x)_n. The sign is 0 when the symbol vanishes.
std::pair<double, int> log_abs_pochhammer(double x, int n);

/// Principal log of (x)_n as a sum of logs; -inf real part when it vanishes.
std::complex<double> log_pochhammer(std::complex<double> x, int n);

/// Calls visit for every (j_1, ..., j_parts) of nonnegative integers summing
/// to total, in lexicographic order.
void for_each_composition(int total, int parts, const std::function<void(std::span<const int>)>& visit);

/// total! / (j_1! ... j_n!) as a double.
double multinomial(std::span<const int> parts);

/// Compensated (Neumaier) summation.
template <typename T>
class CompensatedSum {
 public:
  void add(T v) {
    const T t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace rgflow
