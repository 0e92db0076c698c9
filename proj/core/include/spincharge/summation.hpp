#pragma once

#include <cmath>
#include <vector>

namespace spincharge {

// Neumaier compensated accumulator. All reductions in the library go through
// this in a fixed site order, so repeated runs are bit-identical.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// One-dimensional Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Supported orders: 2..64. Nodes ascending.
GaussRule gauss_legendre(int order);

}  // namespace spincharge
