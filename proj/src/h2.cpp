#include "spnet/h2.hpp"

#include <string>

#include "spnet/electrical.hpp"

namespace spnet {

double h2_series(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw NonPositiveInput("squared H2 values must be positive");
    return a + b;
}

double h2_parallel(double a, double b) { return parallel_add(a, b); }

double h2_single_source(const DecompTree& t, std::span<const double> weights) {
    std::vector<double> h(static_cast<size_t>(t.size()), 0.0);
    for (int i = 0; i < t.size(); i++) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf()) {
            double w = weights.empty() ? n.w : weights[static_cast<size_t>(n.edge_id)];
            if (!(w > 0.0)) throw NonPositiveWeight("leaf weight must be positive");
            h[static_cast<size_t>(i)] = 0.5 / w;
        } else if (n.kind == JoinKind::Series) {
            h[static_cast<size_t>(i)] =
                h2_series(h[static_cast<size_t>(n.left)], h[static_cast<size_t>(n.right)]);
        } else {
            h[static_cast<size_t>(i)] =
                h2_parallel(h[static_cast<size_t>(n.left)], h[static_cast<size_t>(n.right)]);
        }
    }
    return h[static_cast<size_t>(t.root())];
}

std::vector<SourceTree> decompose_all_inputs(const LeaderFollowerSystem& sys) {
    GroundedGraph gg = grounded_graph(sys);
    std::vector<SourceTree> trees;
    trees.reserve(sys.inputs().size());
    for (int s : sys.inputs()) {
        try {
            trees.push_back(SourceTree{s, decompose(gg.graph, s, gg.ground)});
        } catch (const NotSeriesParallel& e) {
            throw NotAllInputTTSP("system is not all-input TTSP: grounded graph is not "
                                  "series-parallel from input " +
                                      std::to_string(s) + " (" + e.what() + ")",
                                  s);
        }
    }
    return trees;
}

H2Value h2_all_input(const LeaderFollowerSystem& sys, std::span<const SourceTree> trees,
                     std::span<const double> follower_weights) {
    std::vector<double> grounded_weights;
    std::span<const double> w;
    if (!follower_weights.empty()) {
        if (static_cast<int>(follower_weights.size()) != sys.followers().edge_count())
            throw InfeasibleWeights("weight vector size does not match follower edge count");
        grounded_weights.assign(follower_weights.begin(), follower_weights.end());
        grounded_weights.resize(follower_weights.size() + sys.inputs().size(), 1.0);
        w = grounded_weights;
    }

    const int ground = sys.followers().node_count();
    H2Value out;
    for (int s : sys.inputs()) {
        const SourceTree* st = nullptr;
        for (const SourceTree& cand : trees)
            if (cand.source == s) {
                st = &cand;
                break;
            }
        if (!st) throw MissingTree("no decomposition tree for input " + std::to_string(s));
        if (st->tree.labeled()) {
            const Terminals& root = st->tree.terminals(st->tree.root());
            if (root.source != s || root.sink != ground)
                throw Error("tree for input " + std::to_string(s) +
                            " does not run from that input to the grounded leader node");
        }
        double contrib = h2_single_source(st->tree, w);
        out.per_source.emplace_back(s, contrib);
        out.squared += contrib;
    }
    return out;
}

}  // namespace spnet
