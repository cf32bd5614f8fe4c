#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spnet/graph.hpp"
#include "spnet/h2.hpp"

namespace spnet {

enum class GradientPath { Auto, Dense, Fast };
enum class OptimizeMode { Paper, ProjectedGradient };

// Evaluator for the edge re-weighting problem
//   min_W  -1/2 Tr(B^T A(W)^-1 B) + h_reg/2 ||W||^2,  w_e > 0,
// over the follower edges; leader edges stay at weight 1. When the system is
// all-input TTSP (or the fast path is requested) the voltage drops behind
// the gradient come from per-source tree passes reusing one decomposition;
// otherwise from dense solves.
class WeightDesignProblem {
public:
    explicit WeightDesignProblem(LeaderFollowerSystem sys,
                                 GradientPath path = GradientPath::Auto);

    const LeaderFollowerSystem& system() const { return sys_; }
    int edge_count() const { return sys_.followers().edge_count(); }
    bool using_fast_path() const { return !trees_.empty(); }

    double value(const Eigen::VectorXd& weights, double h_reg) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& weights, double h_reg) const;
    // Per follower edge e=(i,j): sum over inputs s of (y_i^s - y_j^s)^2.
    Eigen::VectorXd drop_squares(const Eigen::VectorXd& weights) const;

private:
    LeaderFollowerSystem sys_;
    std::vector<SourceTree> trees_;  // empty when on the dense path

    void check_feasible(const Eigen::VectorXd& weights) const;
    std::vector<double> grounded_weights(const Eigen::VectorXd& weights) const;
};

double objective(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                 double h_reg);
Eigen::VectorXd gradient(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                         double h_reg, GradientPath path = GradientPath::Auto);

struct ReweightState {
    Eigen::VectorXd weights;
    long long t = 1;  // iteration counter of the 1/sqrt(t) schedule
    double h_reg = 1.0;
    double w_min = 1e-8;
    std::vector<double> f_history;
    Eigen::VectorXd grad;
};

// One update w+ = (1 - 1/sqrt(t)) w + 1/(2 sqrt(t)) sum_s (y_i^s - y_j^s)^2,
// floored at w_min; equivalent to a gradient step of size 1/sqrt(t) on the
// h_reg = 1 objective.
ReweightState step_paper(const WeightDesignProblem& prob, ReweightState state);

struct ReweightOptions {
    OptimizeMode mode = OptimizeMode::ProjectedGradient;
    double h_reg = 1.0;
    double w_min = 1e-8;
    double tol = 1e-6;
    long long max_iters = 100000;
    GradientPath path = GradientPath::Auto;
    bool keep_trace = false;
};

struct TraceRow {
    long long iter;
    double f;
    double grad_inf;
    Eigen::VectorXd weights;
};

struct ReweightReport {
    Eigen::VectorXd weights;
    double f = 0.0;
    double grad_inf = 0.0;  // stationarity measure (gradient projected at the floor)
    long long iters = 0;
    bool converged = false;
    std::string diagnostic;
    std::vector<double> f_history;
    std::vector<TraceRow> trace;
};

ReweightReport optimize(const LeaderFollowerSystem& sys, const ReweightOptions& opts,
                        std::optional<Eigen::VectorXd> w0 = std::nullopt);

}  // namespace spnet
