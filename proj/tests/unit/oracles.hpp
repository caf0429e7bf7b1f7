#pragma once

#include <cmath>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// iint exp(-(x-y)^2 / (2 sigma^2)) dx dy over [0,1]^2, via the triangular law of x - y.
inline double unit_square_gauss(double sigma) {
  return 2.0 * simpson([&](double z) { return (1.0 - z) * std::exp(-z * z / (2 * sigma * sigma)); },
                       0.0, 1.0);
}

}  // namespace oracle
