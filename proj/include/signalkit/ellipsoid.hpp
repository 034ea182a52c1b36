#pragma once

#include <functional>
#include <vector>

namespace signalkit {

struct SeparationAnswer {
  enum class Kind { kInside, kCut };
  Kind kind = Kind::kInside;
  // When kind == kCut the query point violates  cut_normal·x <= cut_offset.
  std::vector<double> cut_normal;
  double cut_offset = 0.0;

  static SeparationAnswer inside() { return {}; }
  static SeparationAnswer cut(std::vector<double> normal, double offset) {
    return {Kind::kCut, std::move(normal), offset};
  }
};

using SeparationOracle = std::function<SeparationAnswer(const std::vector<double>&)>;

struct EllipsoidCut {
  std::vector<double> normal;
  double offset = 0.0;
};

struct EllipsoidResult {
  bool feasible = false;
  std::vector<double> point;        // accepted point when feasible
  std::vector<EllipsoidCut> cuts;   // every cut returned by the oracle, in order
  int iterations = 0;
};

struct EllipsoidOptions {
  // Tolerance for deciding that a returned cut is not violated at the query point.
  double contract_tol = 1e-9;
};

int ellipsoid_iteration_cap(int dimension, double radius, double volume_tol);

/// Central-cut ellipsoid over the box [-radius, radius]^dimension.
/// Throws ContractViolation if the oracle returns a cut the query point satisfies strictly.
EllipsoidResult ellipsoid_feasibility(const SeparationOracle& oracle, int dimension, double radius,
                                      double volume_tol, const EllipsoidOptions& options = {});

}  // namespace signalkit
