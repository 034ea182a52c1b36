#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "signalkit/matrix.hpp"

namespace signalkit {

using Posterior = std::vector<double>;

struct BayesianGame {
  std::vector<Matrix> payoffs;  // A^theta, one per state
  std::vector<double> prior;
  double payoff_bound = 1.0;

  std::size_t num_states() const { return payoffs.size(); }
  std::size_t rows() const { return payoffs.empty() ? 0 : payoffs.front().rows(); }
  std::size_t cols() const { return payoffs.empty() ? 0 : payoffs.front().cols(); }

  // Throws DimensionError / ContractViolation.
  void validate() const;
};

struct Signal {
  double weight = 0.0;
  Posterior posterior;
};

struct SignalingScheme {
  std::vector<Signal> signals;
};

struct Equilibrium {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
};

/// Any posterior -> value map together with the prior it is evaluated against.
/// The signaling optimizers work on this, so compact games can plug in directly.
struct ValueFunction {
  std::size_t num_states = 0;
  double payoff_bound = 1.0;
  std::vector<double> prior;
  std::function<double(std::span<const double>)> value;
};

// Throws ContractViolation unless mu is a probability vector (within tol).
void check_posterior(std::span<const double> mu, std::size_t num_states, double tol = 1e-9);

Matrix mix_payoffs(const BayesianGame& game, std::span<const double> mu);

struct GameValueOptions {
  // Above this many columns the LP is solved by adding columns on demand.
  std::size_t column_generation_threshold = 120;
};

Equilibrium game_value(const Matrix& a, const GameValueOptions& options = {});

double val(const BayesianGame& game, std::span<const double> mu);

ValueFunction value_function(const BayesianGame& game);

struct SchemeReport {
  double max_residual = 0.0;  // max_theta |sum_s alpha_s mu_s(theta) - prior(theta)|
  double weight_sum = 0.0;
  bool ok = false;
  std::string message;
};

SchemeReport validate_scheme(std::span<const double> prior, const SignalingScheme& scheme, double tol = 1e-8);
SchemeReport validate_scheme(const BayesianGame& game, const SignalingScheme& scheme, double tol = 1e-8);

// Drops zero-weight signals; prunes weights below 1e-12 and renormalizes when the
// decomposition residual stays within 1e-8. Throws InvalidScheme otherwise.
SignalingScheme make_scheme(std::vector<Signal> signals, std::span<const double> prior);

double scheme_value(const ValueFunction& f, const SignalingScheme& scheme);
double scheme_value(const BayesianGame& game, const SignalingScheme& scheme);

enum class BaselineMode { kFull, kNone };

SignalingScheme baseline_scheme(std::span<const double> prior, BaselineMode mode);
inline SignalingScheme baseline_scheme(const BayesianGame& game, BaselineMode mode) {
  return baseline_scheme(game.prior, mode);
}

}  // namespace signalkit
