#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <tuple>
#include <vector>

#include "spnet/random_gen.hpp"
#include "spnet/tree.hpp"

namespace spnet::testing {

inline double rel_err(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1e-300});
    return std::abs(got - want) / scale;
}

// Relative with an absolute floor, for entrywise vector comparisons where
// entries may be legitimately tiny.
inline double err_with_floor(double got, double want, double abs_floor) {
    const double d = std::abs(got - want);
    if (d <= abs_floor) return 0.0;
    return d / std::max({std::abs(got), std::abs(want), abs_floor});
}

// Random connected graph: random spanning tree plus extra chords, weights
// log-uniform in [0.1, 10].
inline WeightedGraph random_connected_graph(std::mt19937_64& rng, int n, int extra_edges) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i < n; i++) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        edges.emplace_back(pick(rng), i, log_uniform(rng, 0.1, 10.0));
    }
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int k = 0; k < extra_edges; k++) {
        int u = any(rng), v = any(rng);
        if (u == v) continue;
        edges.emplace_back(u, v, log_uniform(rng, 0.1, 10.0));
    }
    return WeightedGraph::build(n, edges);
}

// Rebuilds `t` with the subtree rooted at `j` replaced by a single leaf of
// the given weight. Test-only surgery for the equivalent-1-path property.
inline DecompTree replace_subtree_with_leaf(const DecompTree& t, int j, double w) {
    std::vector<char> in_sub(static_cast<size_t>(t.size()), 0);
    in_sub[static_cast<size_t>(j)] = 1;
    for (int i = t.size() - 1; i >= 0; i--) {
        const TreeNode& n = t.node(i);
        if (!n.is_leaf() && in_sub[static_cast<size_t>(i)]) {
            in_sub[static_cast<size_t>(n.left)] = 1;
            in_sub[static_cast<size_t>(n.right)] = 1;
        }
    }
    DecompTree::Raw raw;
    std::vector<int> remap(static_cast<size_t>(t.size()), -1);
    for (int i = 0; i < t.size(); i++) {
        if (in_sub[static_cast<size_t>(i)] && i != j) continue;
        TreeNode n = t.node(i);
        if (i == j) {
            n = TreeNode{};
            n.u = 0;
            n.v = 1;
            n.w = w;
        } else if (!n.is_leaf()) {
            n.left = remap[static_cast<size_t>(n.left)];
            n.right = remap[static_cast<size_t>(n.right)];
        }
        raw.nodes.push_back(n);
        remap[static_cast<size_t>(i)] = static_cast<int>(raw.nodes.size()) - 1;
    }
    raw.root = remap[static_cast<size_t>(t.root())];
    return DecompTree::from_raw(std::move(raw));
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Brute-force scalar minimizer: coarse grid, then golden-section refinement
// around the best cell. Function values only.
inline double grid_refine_1d(const std::function<double(double)>& f, double lo, double hi) {
    const int grid = 2000;
    double best_x = lo, best_f = f(lo);
    for (int i = 1; i <= grid; i++) {
        const double x = lo + (hi - lo) * i / grid;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double cell = (hi - lo) / grid;
    return golden_min(f, std::max(lo, best_x - 2 * cell), std::min(hi, best_x + 2 * cell),
                      1e-11);
}

// Two-dimensional variant: coarse grid, then alternating per-coordinate
// golden sections.
inline Eigen::Vector2d grid_refine_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                                      double lo, double hi) {
    const int grid = 200;
    Eigen::Vector2d best(lo, lo);
    double best_f = f(best);
    for (int i = 0; i <= grid; i++)
        for (int j = 0; j <= grid; j++) {
            Eigen::Vector2d x(lo + (hi - lo) * i / grid, lo + (hi - lo) * j / grid);
            const double fx = f(x);
            if (fx < best_f) {
                best_f = fx;
                best = x;
            }
        }
    for (int sweep = 0; sweep < 60; sweep++) {
        for (int c = 0; c < 2; c++) {
            Eigen::Vector2d probe = best;
            best(c) = golden_min(
                [&](double x) {
                    probe(c) = x;
                    return f(probe);
                },
                lo, hi, 1e-12);
        }
    }
    return best;
}

}  // namespace spnet::testing
