#pragma once

#include <cmath>

namespace dlab {

// Neumaier variant of compensated summation. `sum + comp` carries the running
// total to roughly double-double accuracy for short, ill-conditioned sums.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Error-free transformation: a + b = result + error exactly.
struct TwoSum {
  double result;
  double error;
  TwoSum(double a, double b) {
    result = a + b;
    const double bv = result - a;
    error = (a - (result - bv)) + (b - bv);
  }
};

}  // namespace dlab
