#include "signalkit/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "signalkit/errors.hpp"

namespace signalkit {

std::vector<double> left_multiply(std::span<const double> x, const Matrix& a) {
  if (x.size() != a.rows()) throw DimensionError("left_multiply: vector length differs from row count");
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] == 0.0) continue;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += x[i] * row[j];
  }
  return out;
}

std::vector<double> right_multiply(const Matrix& a, std::span<const double> y) {
  if (y.size() != a.cols()) throw DimensionError("right_multiply: vector length differs from column count");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), y);
  return out;
}

double max_abs_entry(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace signalkit
