#include "spnet/reweight.hpp"

#include <algorithm>
#include <cmath>

#include "spnet/electrical.hpp"
#include "spnet/oracle.hpp"

namespace spnet {

WeightDesignProblem::WeightDesignProblem(LeaderFollowerSystem sys, GradientPath path)
    : sys_(std::move(sys)) {
    if (path == GradientPath::Dense) return;
    try {
        trees_ = decompose_all_inputs(sys_);
    } catch (const NotAllInputTTSP&) {
        if (path == GradientPath::Fast) throw;
        trees_.clear();  // fall back to dense solves
    }
}

void WeightDesignProblem::check_feasible(const Eigen::VectorXd& weights) const {
    if (weights.size() != edge_count())
        throw InfeasibleWeights("weight vector size does not match follower edge count");
    for (int e = 0; e < weights.size(); e++)
        if (!(weights(e) > 0.0))
            throw InfeasibleWeights("weight " + std::to_string(e) + " is not positive");
}

std::vector<double> WeightDesignProblem::grounded_weights(const Eigen::VectorXd& weights) const {
    std::vector<double> w(weights.data(), weights.data() + weights.size());
    w.resize(weights.size() + sys_.inputs().size(), 1.0);  // leader edges fixed at 1
    return w;
}

double WeightDesignProblem::value(const Eigen::VectorXd& weights, double h_reg) const {
    check_feasible(weights);
    if (!using_fast_path()) return oracle::objective_dense(sys_, weights, h_reg);
    const std::vector<double> gw = grounded_weights(weights);
    double h2 = 0.0;
    for (const SourceTree& st : trees_) h2 += 0.5 * effective_resistance(st.tree, gw);
    return h2 + 0.5 * h_reg * weights.squaredNorm();
}

Eigen::VectorXd WeightDesignProblem::drop_squares(const Eigen::VectorXd& weights) const {
    check_feasible(weights);
    const auto& edges = sys_.followers().edges();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(edge_count());
    if (using_fast_path()) {
        const std::vector<double> gw = grounded_weights(weights);
        for (const SourceTree& st : trees_) {
            const ElectricalSolution sol = solve_network(st.tree, 1.0, gw);
            for (const Edge& e : edges) {
                const double dy = sol.potential[static_cast<size_t>(e.u)] -
                                  sol.potential[static_cast<size_t>(e.v)];
                out(e.id) += dy * dy;
            }
        }
        return out;
    }
    WeightedGraph g = sys_.followers();
    for (const Edge& e : edges) g.set_weight(e.id, weights(e.id));
    const oracle::DenseSystem ds = oracle::dense_system(LeaderFollowerSystem(g, sys_.inputs()));
    for (int s : sys_.inputs()) {
        const Eigen::VectorXd y = oracle::voltages_dense(ds, s);
        for (const Edge& e : edges) {
            const double dy = y(e.u) - y(e.v);
            out(e.id) += dy * dy;
        }
    }
    return out;
}

Eigen::VectorXd WeightDesignProblem::gradient(const Eigen::VectorXd& weights,
                                              double h_reg) const {
    return -0.5 * drop_squares(weights) + h_reg * weights;
}

double objective(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                 double h_reg) {
    if (weights.size() != sys.followers().edge_count())
        throw InfeasibleWeights("weight vector size does not match follower edge count");
    for (int e = 0; e < weights.size(); e++)
        if (!(weights(e) > 0.0)) throw InfeasibleWeights("non-positive weight");
    return oracle::objective_dense(sys, weights, h_reg);
}

Eigen::VectorXd gradient(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                         double h_reg, GradientPath path) {
    WeightDesignProblem prob(sys, path);
    return prob.gradient(weights, h_reg);
}

ReweightState step_paper(const WeightDesignProblem& prob, ReweightState state) {
    if (state.t < 1) throw Error("the 1/sqrt(t) update needs t >= 1");
    const double rt = std::sqrt(static_cast<double>(state.t));
    const Eigen::VectorXd d = prob.drop_squares(state.weights);
    state.grad = -0.5 * d + state.h_reg * state.weights;
    state.weights =
        ((1.0 - 1.0 / rt) * state.weights + (0.5 / rt) * d).cwiseMax(state.w_min);
    state.t++;
    state.f_history.push_back(prob.value(state.weights, state.h_reg));
    return state;
}

namespace {

// Stationarity measure: gradient with floor-active coordinates projected
// out (a floored weight whose gradient pushes further down cannot move).
// Equals the plain gradient infinity norm at interior points.
double stationarity(const Eigen::VectorXd& grad, const Eigen::VectorXd& w, double w_min) {
    double m = 0.0;
    for (int e = 0; e < grad.size(); e++) {
        const double g = (w(e) <= w_min && grad(e) > 0.0) ? 0.0 : grad(e);
        m = std::max(m, std::abs(g));
    }
    return m;
}

}  // namespace

ReweightReport optimize(const LeaderFollowerSystem& sys, const ReweightOptions& opts,
                        std::optional<Eigen::VectorXd> w0) {
    if (opts.mode == OptimizeMode::Paper && opts.h_reg != 1.0)
        throw std::invalid_argument(
            "the 1/sqrt(t) replay update embeds h_reg = 1; use projected gradient for "
            "other regularization weights");

    WeightDesignProblem prob(sys, opts.path);
    Eigen::VectorXd w = w0.value_or(Eigen::VectorXd::Ones(prob.edge_count()).eval());
    for (int e = 0; e < w.size(); e++)
        if (!(w(e) >= opts.w_min)) w(e) = opts.w_min;

    ReweightReport rep;
    double f = prob.value(w, opts.h_reg);
    rep.f_history.push_back(f);
    double best_f = f;
    Eigen::VectorXd best_w = w;

    long long steps = 0;
    double alpha = 1.0;
    bool stalled = false;
    while (steps < opts.max_iters) {
        const Eigen::VectorXd g = prob.gradient(w, opts.h_reg);
        rep.grad_inf = stationarity(g, w, opts.w_min);
        if (opts.keep_trace) rep.trace.push_back(TraceRow{steps, f, rep.grad_inf, w});
        if (rep.grad_inf <= opts.tol) {
            rep.converged = true;
            break;
        }

        if (opts.mode == OptimizeMode::Paper) {
            const double rt = std::sqrt(static_cast<double>(steps + 1));
            const Eigen::VectorXd d = prob.drop_squares(w);
            w = ((1.0 - 1.0 / rt) * w + (0.5 / rt) * d).cwiseMax(opts.w_min);
            f = prob.value(w, opts.h_reg);
        } else {
            // backtracking line search with projection onto [w_min, inf)
            bool moved = false;
            while (alpha > 1e-18) {
                const Eigen::VectorXd wt = (w - alpha * g).cwiseMax(opts.w_min);
                const double pred = g.dot(wt - w);
                if (pred < 0.0) {
                    const double ft = prob.value(wt, opts.h_reg);
                    if (ft <= f + 1e-4 * pred) {
                        w = wt;
                        f = ft;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!moved) {
                stalled = true;
                break;
            }
            alpha = std::min(alpha * 2.0, 1e6);
        }

        steps++;
        rep.f_history.push_back(f);
        if (f < best_f) {
            best_f = f;
            best_w = w;
        }
    }

    if (rep.converged) {
        rep.weights = w;
        rep.f = f;
    } else {
        // the replay update is not monotone, so hand back the best iterate
        if (opts.mode == OptimizeMode::Paper && best_f < f) {
            rep.weights = best_w;
            rep.f = best_f;
        } else {
            rep.weights = w;
            rep.f = f;
        }
        rep.grad_inf =
            stationarity(prob.gradient(rep.weights, opts.h_reg), rep.weights, opts.w_min);
        rep.diagnostic = stalled ? "line search stalled before reaching tolerance"
                                 : "max iterations exceeded; returning best iterate";
    }
    rep.iters = steps;
    if (opts.keep_trace) {
        TraceRow last{steps, rep.f, rep.grad_inf, rep.weights};
        if (!rep.trace.empty() && rep.trace.back().iter == steps)
            rep.trace.back() = last;
        else
            rep.trace.push_back(last);
    }
    return rep;
}

}  // namespace spnet
