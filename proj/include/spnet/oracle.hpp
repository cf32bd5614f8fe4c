#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "spnet/graph.hpp"

namespace spnet::oracle {

// Reference implementations used as ground truth for the tree-pass solvers.
// Deliberately slow and simple, and kept free of any shared code with the
// fast paths: matrices are assembled here from edge lists directly.

// Laplacian assembled as the incidence product E W E^T (the fast side sums
// rank-1 terms, so the two assembly routes are independent).
Eigen::MatrixXd laplacian_dense(const WeightedGraph& g);

// Effective resistance (e_k - e_l)^T L^+ (e_k - e_l) via eigendecomposition
// with rank tolerance 1e-10 * ||L||.
double effective_resistance_dense(const WeightedGraph& g, int k, int l);

// A grounded system: A negative definite, B input indicator columns. rows[i]
// is the graph node id behind matrix row i.
struct DenseSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    std::vector<int> rows;
    std::vector<int> inputs;

    int row_of(int node) const;
};

// From a leader-follower system: rows are the follower nodes in id order.
DenseSystem dense_system(const LeaderFollowerSystem& sys);

// From any connected graph with one node grounded (deleted) and current
// injected at the given nodes; covers the single-leader setups where ground
// attachments carry arbitrary weights.
DenseSystem grounded_dense_system(const WeightedGraph& g, int ground,
                                  std::span<const int> inputs);

// Solves -A y = e_s; entrywise nonnegative voltages relative to the ground.
// s is a graph node id present in sys.rows.
Eigen::VectorXd voltages_dense(const DenseSystem& sys, int s);

// -1/2 Tr(B^T A^-1 B), the squared H2 norm of dx = Ax + Bu with full
// observation.
double h2_dense(const DenseSystem& sys);

// Tr(P) with A P + P A^T + B B^T = 0; equals h2_dense for symmetric A.
double h2_gramian(const DenseSystem& sys);

// Full Lyapunov solution, exposed so tests can check the residual.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// Objective of the weight design problem evaluated from scratch:
// -1/2 Tr(B^T A(W)^-1 B) + h_reg/2 * sum w_e^2.
double objective_dense(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                       double h_reg);

// Central finite differences of objective_dense, per-edge step
// `step * max(1, w_e)`.
Eigen::VectorXd gradient_fd(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                            double h_reg, double step = 1e-6);

}  // namespace spnet::oracle
