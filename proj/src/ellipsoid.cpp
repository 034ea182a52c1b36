#include "signalkit/ellipsoid.hpp"

#include <cmath>
#include <sstream>

#include "signalkit/errors.hpp"

namespace signalkit {

int ellipsoid_iteration_cap(int dimension, double radius, double volume_tol) {
  if (dimension < 1) throw DimensionError("ellipsoid dimension must be positive");
  if (!(radius > 0.0) || !(volume_tol > 0.0)) throw ContractViolation("radius and volume_tol must be positive");
  const double d = dimension;
  const double logs = std::max(0.0, std::log(radius / volume_tol));
  return static_cast<int>(std::ceil(2.0 * d * d * logs)) + dimension;
}

EllipsoidResult ellipsoid_feasibility(const SeparationOracle& oracle, int dimension, double radius,
                                      double volume_tol, const EllipsoidOptions& options) {
  const int cap = ellipsoid_iteration_cap(dimension, radius, volume_tol);
  const std::size_t d = static_cast<std::size_t>(dimension);
  const double dd = static_cast<double>(d);

  // Ball of radius R*sqrt(d) contains the box.
  std::vector<double> c(d, 0.0);
  std::vector<double> p(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) p[i * d + i] = dd * radius * radius;

  EllipsoidResult res;
  std::vector<double> pa(d);
  for (int it = 0; it <= cap; ++it) {
    res.iterations = it;
    SeparationAnswer ans = oracle(c);
    if (ans.kind == SeparationAnswer::Kind::kInside) {
      res.feasible = true;
      res.point = c;
      return res;
    }
    if (ans.cut_normal.size() != d) throw DimensionError("separation oracle returned a cut of wrong length");
    double ac = 0.0;
    double scale = std::fabs(ans.cut_offset);
    for (std::size_t i = 0; i < d; ++i) {
      ac += ans.cut_normal[i] * c[i];
      scale = std::max(scale, std::fabs(ans.cut_normal[i] * c[i]));
    }
    if (ac < ans.cut_offset - options.contract_tol * (1.0 + scale)) {
      std::ostringstream msg;
      msg << "separation oracle returned a cut not violated at the query point (a·x=" << ac
          << ", offset=" << ans.cut_offset << ")";
      throw ContractViolation(msg.str());
    }
    res.cuts.push_back({ans.cut_normal, ans.cut_offset});
    if (it == cap) break;

    const auto& a = ans.cut_normal;
    double apa = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += p[i * d + j] * a[j];
      pa[i] = s;
      apa += a[i] * s;
    }
    if (!(apa > 0.0)) break;  // degenerate ellipsoid: volume exhausted
    const double root = std::sqrt(apa);
    if (d == 1) {
      // Exact bisection of the interval.
      const double half = std::sqrt(p[0]);
      const double dir = a[0] > 0.0 ? 1.0 : -1.0;
      c[0] -= dir * half / 2.0;
      p[0] = (half / 2.0) * (half / 2.0);
      if (half / 2.0 < volume_tol) {
        // Interval narrower than the tolerance: one more query decides.
        res.iterations = it + 1;
        SeparationAnswer last = oracle(c);
        if (last.kind == SeparationAnswer::Kind::kInside) {
          res.feasible = true;
          res.point = c;
        } else if (last.cut_normal.size() == d) {
          res.cuts.push_back({last.cut_normal, last.cut_offset});
        }
        return res;
      }
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) c[i] -= pa[i] / root / (dd + 1.0);
    const double f = dd * dd / (dd * dd - 1.0);
    const double g = 2.0 / (dd + 1.0) / apa;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) p[i * d + j] = f * (p[i * d + j] - g * pa[i] * pa[j]);
  }
  return res;
}

}  // namespace signalkit
