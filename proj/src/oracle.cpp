#include "spnet/oracle.hpp"

#include <algorithm>
#include <string>

namespace spnet::oracle {

Eigen::MatrixXd laplacian_dense(const WeightedGraph& g) {
    const int n = g.node_count();
    const int m = g.edge_count();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, m);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    for (const Edge& e : g.edges()) {
        E(e.u, e.id) = 1.0;
        E(e.v, e.id) = -1.0;
        W(e.id, e.id) = e.w;
    }
    return E * W * E.transpose();
}

double effective_resistance_dense(const WeightedGraph& g, int k, int l) {
    if (!g.connected()) throw Disconnected("effective resistance needs a connected graph");
    if (k < 0 || k >= g.node_count() || l < 0 || l >= g.node_count())
        throw Error("terminal outside graph");
    const Eigen::MatrixXd L = laplacian_dense(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
    if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double tol = 1e-10 * lam.cwiseAbs().maxCoeff();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(g.node_count());
    d(k) = 1.0;
    d(l) = -1.0;
    const Eigen::VectorXd c = eig.eigenvectors().transpose() * d;
    double r = 0.0;
    for (int i = 0; i < lam.size(); i++)
        if (lam(i) > tol) r += c(i) * c(i) / lam(i);
    return r;
}

int DenseSystem::row_of(int node) const {
    for (int i = 0; i < static_cast<int>(rows.size()); i++)
        if (rows[static_cast<size_t>(i)] == node) return i;
    throw Error("node " + std::to_string(node) + " not in grounded system");
}

DenseSystem dense_system(const LeaderFollowerSystem& sys) {
    if (!sys.followers().connected()) throw Disconnected("follower graph is disconnected");
    const int n = sys.followers().node_count();
    DenseSystem ds;
    ds.rows.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) ds.rows[static_cast<size_t>(i)] = i;
    Eigen::MatrixXd Lg = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : sys.followers().edges()) {
        Lg(e.u, e.u) += e.w;
        Lg(e.v, e.v) += e.w;
        Lg(e.u, e.v) -= e.w;
        Lg(e.v, e.u) -= e.w;
    }
    for (int s : sys.inputs()) Lg(s, s) += 1.0;
    ds.A = -Lg;
    ds.B = Eigen::MatrixXd::Zero(n, static_cast<int>(sys.inputs().size()));
    for (int j = 0; j < static_cast<int>(sys.inputs().size()); j++)
        ds.B(sys.inputs()[static_cast<size_t>(j)], j) = 1.0;
    ds.inputs = sys.inputs();
    return ds;
}

DenseSystem grounded_dense_system(const WeightedGraph& g, int ground,
                                  std::span<const int> inputs) {
    if (!g.connected()) throw Disconnected("grounded system needs a connected graph");
    const int n = g.node_count();
    if (ground < 0 || ground >= n) throw Error("ground node outside graph");
    DenseSystem ds;
    std::vector<int> row(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; i++) {
        if (i == ground) continue;
        row[static_cast<size_t>(i)] = static_cast<int>(ds.rows.size());
        ds.rows.push_back(i);
    }
    const int m = n - 1;
    Eigen::MatrixXd Lg = Eigen::MatrixXd::Zero(m, m);
    for (const Edge& e : g.edges()) {
        const int ru = row[static_cast<size_t>(e.u)];
        const int rv = row[static_cast<size_t>(e.v)];
        if (ru >= 0) Lg(ru, ru) += e.w;
        if (rv >= 0) Lg(rv, rv) += e.w;
        if (ru >= 0 && rv >= 0) {
            Lg(ru, rv) -= e.w;
            Lg(rv, ru) -= e.w;
        }
    }
    ds.A = -Lg;
    ds.B = Eigen::MatrixXd::Zero(m, static_cast<int>(inputs.size()));
    for (int j = 0; j < static_cast<int>(inputs.size()); j++) {
        ds.B(ds.row_of(inputs[static_cast<size_t>(j)]), j) = 1.0;
        ds.inputs.push_back(inputs[static_cast<size_t>(j)]);
    }
    return ds;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_neg(const Eigen::MatrixXd& A) {
    Eigen::LLT<Eigen::MatrixXd> llt(-A);
    if (llt.info() != Eigen::Success)
        throw SingularA("grounded matrix is not negative definite");
    return llt;
}

}  // namespace

Eigen::VectorXd voltages_dense(const DenseSystem& sys, int s) {
    auto llt = factor_neg(sys.A);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(sys.A.rows());
    e(sys.row_of(s)) = 1.0;
    return llt.solve(e);
}

double h2_dense(const DenseSystem& sys) {
    auto llt = factor_neg(sys.A);
    const Eigen::MatrixXd X = llt.solve(sys.B);
    return 0.5 * (sys.B.transpose() * X).trace();
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    if (eig.info() != Eigen::Success) throw SingularLyapunov("eigendecomposition failed");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::MatrixXd& V = eig.eigenvectors();
    const Eigen::MatrixXd C = V.transpose() * Q * V;
    Eigen::MatrixXd M(lam.size(), lam.size());
    for (int i = 0; i < lam.size(); i++) {
        for (int j = 0; j < lam.size(); j++) {
            const double denom = -(lam(i) + lam(j));
            if (!(denom > 0.0))
                throw SingularLyapunov("A is not Hurwitz; Lyapunov equation singular");
            M(i, j) = C(i, j) / denom;
        }
    }
    return V * M * V.transpose();
}

double h2_gramian(const DenseSystem& sys) {
    return lyapunov_solve(sys.A, sys.B * sys.B.transpose()).trace();
}

double objective_dense(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                       double h_reg) {
    const int m = sys.followers().edge_count();
    if (weights.size() != m) throw InfeasibleWeights("weight vector size mismatch");
    const int n = sys.followers().node_count();
    Eigen::MatrixXd Lg = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : sys.followers().edges()) {
        const double w = weights(e.id);
        if (!(w > 0.0)) throw InfeasibleWeights("non-positive weight in objective");
        Lg(e.u, e.u) += w;
        Lg(e.v, e.v) += w;
        Lg(e.u, e.v) -= w;
        Lg(e.v, e.u) -= w;
    }
    for (int s : sys.inputs()) Lg(s, s) += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(Lg);
    if (llt.info() != Eigen::Success) throw SingularA("grounded matrix not positive definite");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, static_cast<int>(sys.inputs().size()));
    for (int j = 0; j < static_cast<int>(sys.inputs().size()); j++)
        B(sys.inputs()[static_cast<size_t>(j)], j) = 1.0;
    const double h2 = 0.5 * (B.transpose() * llt.solve(B)).trace();
    return h2 + 0.5 * h_reg * weights.squaredNorm();
}

Eigen::VectorXd gradient_fd(const LeaderFollowerSystem& sys, const Eigen::VectorXd& weights,
                            double h_reg, double step) {
    Eigen::VectorXd grad(weights.size());
    for (int e = 0; e < weights.size(); e++) {
        const double h = step * std::max(1.0, weights(e));
        Eigen::VectorXd wp = weights, wm = weights;
        wp(e) += h;
        wm(e) -= h;
        grad(e) = (objective_dense(sys, wp, h_reg) - objective_dense(sys, wm, h_reg)) / (2 * h);
    }
    return grad;
}

}  // namespace spnet::oracle
