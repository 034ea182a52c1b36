#pragma once

#include <span>
#include <vector>

#include "signalkit/graph.hpp"
#include "signalkit/lp.hpp"
#include "signalkit/matrix.hpp"
#include "signalkit/signaling.hpp"
#include "signalkit/zerosum.hpp"

namespace signalkit {

/// Compact zero-sum game with A^theta = Abar + b^theta 1^T + 1 (d^theta)^T,
/// b^theta and d^theta being column theta of B (r x M) and D (c x M).
struct ExtendedSecurityGame {
  Matrix abar;
  Matrix b;
  Matrix d;
  std::vector<double> prior;
  double payoff_bound = 1.0;

  std::size_t rows() const { return abar.rows(); }
  std::size_t cols() const { return abar.cols(); }
  std::size_t num_states() const { return b.cols(); }

  void validate() const;
  // Largest |entry| over all implied dense payoffs.
  double max_abs_payoff() const;
};

BayesianGame expand(const ExtendedSecurityGame& esg);

// LP in the r row-strategy variables plus one scalar; no dense expansion.
Equilibrium val_compact(const ExtendedSecurityGame& esg, std::span<const double> mu);

// Value of a fixed row strategy x at posterior mu: x^T B mu + min_j (x^T Abar + mu^T D^T)_j.
double strategy_value(const ExtendedSecurityGame& esg, std::span<const double> x, std::span<const double> mu);

ValueFunction value_function(const ExtendedSecurityGame& esg);

// Lipschitz bound of the game, i.e. of D^T over the simplex.
double lipschitz_bound(const ExtendedSecurityGame& esg);

ExtendedSecurityGame network_security_game(const Graph& graph, double rho);

// ---- BCBS gadget --------------------------------------------------------

struct BcbsParameters {
  Rational eps;
  Rational eta;
  Rational rho;
};

BcbsParameters bcbs_parameters(int n, int r);

struct BcbsGadget {
  ExtendedSecurityGame game;
  Graph graph;
  double eta = 0.0;
  double eps = 0.0;
  double rho = 0.0;
  int n = 0;
  int r = 0;
};

BcbsGadget bcbs_gadget(const Graph& bipartite_graph, int r);

struct BcbsExtraction {
  std::vector<std::size_t> v_side;  // {v : mu_v >= 1/n^3}
  std::vector<std::size_t> w_side;  // {v : x_v >= 1/n^3}
  double value = 0.0;               // strategy_value(x, mu)
  bool precondition = false;        // value >= eta - eps
  bool biclique = false;            // all pairs adjacent, sides disjoint
  bool large_enough = false;        // both sides have >= r vertices
};

BcbsExtraction bcbs_extract(const BcbsGadget& gadget, std::span<const double> mu, std::span<const double> x);

// Exact check of val(mu) >= eta + eps using rational arithmetic on the dense game.
bool bcbs_value_at_least_exact(const BcbsGadget& gadget, const std::vector<Rational>& mu, const Rational& target);

// ---- bimatrix gadget ----------------------------------------------------

// Column (i', j) of the gadget is stored at index i' * n + j.
ExtendedSecurityGame bimatrix_gadget(const Matrix& R, const Matrix& C, double eps);

struct BimatrixExtraction {
  std::vector<double> x;
  Posterior mu;
  double value = 0.0;
  double welfare = 0.0;
  double nash_residual = 0.0;
};

BimatrixExtraction bimatrix_extract(const Matrix& R, const Matrix& C, double eps, std::span<const double> mu);

struct WelfareSearch {
  double target = 0.0;  // largest eta' with a witness
  bool found = false;
  BimatrixExtraction extraction;
};

// Binary search on eta' in [-2, 2]; threshold eta' - eps via the grid dual oracle at the given delta.
WelfareSearch bimatrix_welfare_search(const Matrix& R, const Matrix& C, double eps, double delta);

// ---- vertex-cover gadget ------------------------------------------------

struct ObjectiveTensor {
  std::vector<Matrix> entries;  // F^theta, r x c
};

struct VertexCoverGadget {
  BayesianGame game;
  ObjectiveTensor objective;
  Graph graph;
  std::vector<Edge> edges;  // column n + k is edges[k]; the last column is s
};

VertexCoverGadget vertex_cover_gadget(const Graph& graph);

struct PrincipalValue {
  int value = 0;  // 0 or 1
  std::vector<double> x;
};

PrincipalValue vc_principal_value(const VertexCoverGadget& gadget, std::span<const double> mu);

ValueFunction vc_value_function(const VertexCoverGadget& gadget);

// Two signals: uniform on the cover (weight |C|/n) and uniform on the rest.
SignalingScheme vc_cover_scheme(const VertexCoverGadget& gadget, std::span<const std::size_t> cover);

}  // namespace signalkit
