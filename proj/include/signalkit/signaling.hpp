#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "signalkit/matrix.hpp"
#include "signalkit/zerosum.hpp"

namespace signalkit {

inline constexpr std::size_t kDefaultNetCap = 2'000'000;

// Returns K = 1/delta, throwing ContractViolation unless it is a positive integer.
int net_resolution(double delta);

// C(M-1+K, M-1), saturating at SIZE_MAX.
std::size_t net_size(std::size_t num_states, int resolution);

struct DeltaNet {
  double delta = 1.0;
  int resolution = 1;                    // K = 1/delta
  std::size_t num_states = 0;
  std::vector<std::vector<int>> counts;  // k with sum K; point = k * delta
  std::vector<Posterior> points;

  std::size_t size() const { return points.size(); }
};

// Grid points of the simplex in lexicographic order of their counts.
DeltaNet delta_net(std::size_t num_states, double delta, std::size_t cap = kDefaultNetCap);

// The point of S_delta within infinity-distance delta of mu that minimizes w·point.
Posterior round_to_net(std::span<const double> mu, double delta, std::span<const double> w);

struct SignalingResult {
  SignalingScheme scheme;
  double value = 0.0;
  std::vector<double> dual;  // w solving the restricted dual program
};

// Concavification LP over the whole net.
SignalingResult optimal_signaling_dnet(const ValueFunction& f, double delta, std::size_t cap = kDefaultNetCap);
SignalingResult optimal_signaling_dnet(const BayesianGame& game, double delta, std::size_t cap = kDefaultNetCap);

struct DualOracleAnswer {
  enum class Case { kWitness, kEmpty };
  Case which = Case::kEmpty;
  Posterior witness;
  double slack = 0.0;  // max over the net of val(mu) - w·mu
};

using DualOracle = std::function<DualOracleAnswer(std::span<const double> w, double eps)>;

// Exhaustive dual oracle over a fixed net; net values are computed once on construction.
class DualGridOracle {
 public:
  DualGridOracle(const ValueFunction& f, double delta, std::size_t cap = kDefaultNetCap);

  DualOracleAnswer query(std::span<const double> w, double eps) const;

  const DeltaNet& net() const { return net_; }
  const std::vector<double>& values() const { return values_; }

 private:
  DeltaNet net_;
  std::vector<double> values_;
};

// Net resolution delta = 1/ceil(gamma/eps) (gamma <= 0 gives the vertex net).
double oracle_delta(double gamma, double eps);

DualOracleAnswer dual_oracle_grid(const ValueFunction& f, std::span<const double> w, double eps, double delta,
                                  std::size_t cap = kDefaultNetCap);
DualOracleAnswer dual_oracle_grid(const BayesianGame& game, std::span<const double> w, double eps, double delta,
                                  std::size_t cap = kDefaultNetCap);

struct EllipsoidCutRecord {
  std::vector<double> w;  // query point of the cut
  Posterior mu;           // rounded net posterior
  double value = 0.0;     // val(mu)
  double nu = 0.0;
};

struct EllipsoidSignalingResult {
  SignalingScheme scheme;
  double value = 0.0;
  double delta = 0.0;     // resolution of the rounding net
  double nu_star = 0.0;   // smallest threshold found feasible
  std::vector<EllipsoidCutRecord> cuts;
  std::size_t support_size = 0;
  int ellipsoid_runs = 0;
};

EllipsoidSignalingResult ellipsoid_signaling(const ValueFunction& f, double eps, const DualOracle& oracle);

struct MaxPriorResult {
  Posterior prior;
  double value = 0.0;
};

MaxPriorResult max_prior_grid(const ValueFunction& f, double delta, std::size_t cap = kDefaultNetCap);
MaxPriorResult max_prior_grid(const BayesianGame& game, double delta, std::size_t cap = kDefaultNetCap);

// Certified Lipschitz constant of x -> x^T A over the simplex (sup norms).
double lipschitz_bound(const Matrix& a);

}  // namespace signalkit
