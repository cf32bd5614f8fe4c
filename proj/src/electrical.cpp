#include "spnet/electrical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spnet {

double parallel_add(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw NonPositiveInput("parallel addition needs positive operands, got " +
                               std::to_string(x) + " and " + std::to_string(y));
    return 1.0 / (1.0 / x + 1.0 / y);
}

std::pair<double, double> current_split(double i, double r1, double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0))
        throw NonPositiveResistance("current split needs positive resistances, got " +
                                    std::to_string(r1) + " and " + std::to_string(r2));
    const double i1 = i * r2 / (r1 + r2);
    return {i1, i - i1};
}

namespace {

inline double leaf_weight(const TreeNode& n, std::span<const double> weights) {
    if (weights.empty()) return n.w;
    if (n.edge_id < 0 || n.edge_id >= static_cast<int>(weights.size()))
        throw Error("leaf edge id " + std::to_string(n.edge_id) +
                    " outside weight override");
    double w = weights[static_cast<size_t>(n.edge_id)];
    if (!(w > 0.0))
        throw NonPositiveWeight("weight override for edge " + std::to_string(n.edge_id) +
                                " is non-positive");
    return w;
}

}  // namespace

std::vector<double> resistance_pass(const DecompTree& t, std::span<const double> weights) {
    std::vector<double> r(static_cast<size_t>(t.size()), 0.0);
    for (int i = 0; i < t.size(); i++) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf())
            r[static_cast<size_t>(i)] = 1.0 / leaf_weight(n, weights);
        else if (n.kind == JoinKind::Series)
            r[static_cast<size_t>(i)] =
                r[static_cast<size_t>(n.left)] + r[static_cast<size_t>(n.right)];
        else
            r[static_cast<size_t>(i)] =
                parallel_add(r[static_cast<size_t>(n.left)], r[static_cast<size_t>(n.right)]);
    }
    return r;
}

double effective_resistance(const DecompTree& t, std::span<const double> weights) {
    return resistance_pass(t, weights)[static_cast<size_t>(t.root())];
}

std::vector<double> current_pass(const DecompTree& t, std::span<const double> r_eff,
                                 double i_total) {
    std::vector<double> cur(static_cast<size_t>(t.size()), 0.0);
    cur[static_cast<size_t>(t.root())] = i_total;
    for (int i = t.size() - 1; i >= 0; i--) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf()) continue;
        const double iin = cur[static_cast<size_t>(i)];
        if (n.kind == JoinKind::Series) {
            cur[static_cast<size_t>(n.left)] = iin;
            cur[static_cast<size_t>(n.right)] = iin;
        } else {
            auto [i1, i2] = current_split(iin, r_eff[static_cast<size_t>(n.left)],
                                          r_eff[static_cast<size_t>(n.right)]);
            cur[static_cast<size_t>(n.left)] = i1;
            cur[static_cast<size_t>(n.right)] = i2;
        }
    }
    return cur;
}

std::vector<double> voltage_pass(const DecompTree& t, std::span<const double> current,
                                 std::span<const double> weights) {
    std::vector<double> v(static_cast<size_t>(t.size()), 0.0);
    for (int i = 0; i < t.size(); i++) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf()) {
            v[static_cast<size_t>(i)] = current[static_cast<size_t>(i)] / leaf_weight(n, weights);
        } else if (n.kind == JoinKind::Series) {
            v[static_cast<size_t>(i)] =
                v[static_cast<size_t>(n.left)] + v[static_cast<size_t>(n.right)];
        } else {
            const double v1 = v[static_cast<size_t>(n.left)];
            const double v2 = v[static_cast<size_t>(n.right)];
            if (std::abs(v1 - v2) > 1e-9 * std::max({std::abs(v1), std::abs(v2), 1e-300}))
                throw ParallelVoltageMismatch(
                    "children of parallel join disagree: " + format_double(v1) + " vs " +
                    format_double(v2) + " (inconsistent currents)");
            v[static_cast<size_t>(i)] = 0.5 * (v1 + v2);
        }
    }
    return v;
}

std::vector<double> potential_pass(const DecompTree& t, std::span<const double> v_drop) {
    if (!t.labeled()) throw Error("potentials need a labeled tree; realize it first");
    int max_label = 0;
    for (int i = 0; i < t.size(); i++)
        max_label = std::max({max_label, t.terminals(i).source, t.terminals(i).sink});
    std::vector<double> pot(static_cast<size_t>(max_label) + 1,
                            std::numeric_limits<double>::quiet_NaN());
    pot[static_cast<size_t>(t.terminals(t.root()).source)] =
        v_drop[static_cast<size_t>(t.root())];
    pot[static_cast<size_t>(t.terminals(t.root()).sink)] = 0.0;
    for (int i = t.size() - 1; i >= 0; i--) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf() || n.kind != JoinKind::Series) continue;
        // middle node identified by the series join, oriented source -> sink
        const int mid = t.terminals(n.left).sink;
        pot[static_cast<size_t>(mid)] = pot[static_cast<size_t>(t.terminals(i).source)] -
                                        v_drop[static_cast<size_t>(n.left)];
    }
    return pot;
}

ElectricalSolution solve_network(const DecompTree& t, double i_total,
                                 std::span<const double> weights) {
    ElectricalSolution sol;
    sol.i_total = i_total;
    sol.r_eff = resistance_pass(t, weights);
    sol.current = current_pass(t, sol.r_eff, i_total);
    sol.v_drop = voltage_pass(t, sol.current, weights);
    if (t.labeled()) {
        sol.potential = potential_pass(t, sol.v_drop);
    } else {
        // labeling keeps arena indices, so the drops carry over
        sol.potential = potential_pass(label_terminals(t), sol.v_drop);
    }
    return sol;
}

long long round_count(const DecompTree& t) { return tree_height(t) + 1; }

}  // namespace spnet
