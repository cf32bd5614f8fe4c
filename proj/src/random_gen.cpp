#include "spnet/random_gen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace spnet {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

namespace {

DecompTree random_leaf(std::mt19937_64& rng, int index, const TreeGenOptions& opts) {
    return leaf(2 * index, 2 * index + 1, log_uniform(rng, opts.w_min, opts.w_max));
}

JoinKind random_kind(std::mt19937_64& rng, const TreeGenOptions& opts) {
    std::bernoulli_distribution coin(opts.parallel_prob);
    return coin(rng) ? JoinKind::Parallel : JoinKind::Series;
}

}  // namespace

DecompTree random_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts) {
    if (leaves < 1) throw Error("tree needs at least one leaf");

    // Remy insertion on a scratch structure: pick any node, hang it under a
    // new internal node together with a new leaf, on a random side.
    struct SNode {
        int left = -1, right = -1, parent = -1;
    };
    std::vector<SNode> sn(1);
    int root = 0;
    std::uniform_int_distribution<int> side(0, 1);
    for (int k = 1; k < leaves; k++) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(sn.size()) - 1);
        const int x = pick(rng);
        const int p = static_cast<int>(sn.size());
        sn.push_back(SNode{});
        const int m = static_cast<int>(sn.size());
        sn.push_back(SNode{});
        sn[static_cast<size_t>(p)].parent = sn[static_cast<size_t>(x)].parent;
        if (sn[static_cast<size_t>(x)].parent >= 0) {
            SNode& gp = sn[static_cast<size_t>(sn[static_cast<size_t>(x)].parent)];
            (gp.left == x ? gp.left : gp.right) = p;
        } else {
            root = p;
        }
        sn[static_cast<size_t>(x)].parent = p;
        sn[static_cast<size_t>(m)].parent = p;
        if (side(rng) == 0) {
            sn[static_cast<size_t>(p)].left = x;
            sn[static_cast<size_t>(p)].right = m;
        } else {
            sn[static_cast<size_t>(p)].left = m;
            sn[static_cast<size_t>(p)].right = x;
        }
    }

    // Emit post-order into an arena.
    DecompTree::Raw raw;
    raw.nodes.reserve(sn.size());
    std::vector<int> new_idx(sn.size(), -1);
    std::vector<std::pair<int, int>> stack{{root, 0}};
    int leaf_count = 0;
    while (!stack.empty()) {
        auto& [i, state] = stack.back();
        const SNode& n = sn[static_cast<size_t>(i)];
        if (n.left < 0) {
            const DecompTree lt = random_leaf(rng, leaf_count++, opts);
            raw.nodes.push_back(lt.node(0));
            new_idx[static_cast<size_t>(i)] = static_cast<int>(raw.nodes.size()) - 1;
            stack.pop_back();
        } else if (state == 0) {
            state = 1;
            stack.emplace_back(n.left, 0);
        } else if (state == 1) {
            state = 2;
            stack.emplace_back(n.right, 0);
        } else {
            TreeNode tn;
            tn.kind = random_kind(rng, opts);
            tn.left = new_idx[static_cast<size_t>(n.left)];
            tn.right = new_idx[static_cast<size_t>(n.right)];
            raw.nodes.push_back(tn);
            new_idx[static_cast<size_t>(i)] = static_cast<int>(raw.nodes.size()) - 1;
            stack.pop_back();
        }
    }
    raw.root = new_idx[static_cast<size_t>(root)];
    return DecompTree::from_raw(std::move(raw));
}

DecompTree balanced_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts) {
    if (leaves < 1) throw Error("tree needs at least one leaf");
    std::deque<DecompTree> level;
    for (int i = 0; i < leaves; i++) level.push_back(random_leaf(rng, i, opts));
    while (level.size() > 1) {
        std::deque<DecompTree> next;
        while (level.size() >= 2) {
            DecompTree a = std::move(level.front());
            level.pop_front();
            DecompTree b = std::move(level.front());
            level.pop_front();
            next.push_back(random_kind(rng, opts) == JoinKind::Parallel
                               ? parallel(std::move(a), std::move(b))
                               : series(std::move(a), std::move(b)));
        }
        if (!level.empty()) {
            next.push_back(std::move(level.front()));
            level.pop_front();
        }
        level = std::move(next);
    }
    return std::move(level.front());
}

DecompTree chain_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts) {
    if (leaves < 1) throw Error("tree needs at least one leaf");
    DecompTree t = random_leaf(rng, 0, opts);
    for (int i = 1; i < leaves; i++) {
        DecompTree l = random_leaf(rng, i, opts);
        t = random_kind(rng, opts) == JoinKind::Parallel
                ? parallel(std::move(t), std::move(l))
                : series(std::move(t), std::move(l));
    }
    return t;
}

LeaderFollowerSystem random_all_input_system(std::mt19937_64& rng, int inputs,
                                             int max_blob_leaves,
                                             const TreeGenOptions& opts) {
    if (inputs < 1) throw Error("system needs at least one input");
    std::vector<int> in(static_cast<size_t>(inputs));
    for (int i = 0; i < inputs; i++) in[static_cast<size_t>(i)] = i;
    if (inputs == 1)
        return LeaderFollowerSystem(WeightedGraph::build(1, {}), in);

    WeightedGraph followers = WeightedGraph::build(inputs, {});
    int next_node = inputs;
    std::uniform_int_distribution<int> blob_size(1, max_blob_leaves);
    for (int i = 0; i + 1 < inputs; i++) {
        DecompTree blob = random_tree(rng, blob_size(rng), opts);
        const Realization r = realize(blob);
        // map the blob onto the chain: source -> input i, sink -> input i+1,
        // interior nodes fresh
        std::vector<int> map(static_cast<size_t>(r.graph.node_count()), -1);
        map[static_cast<size_t>(r.source)] = i;
        map[static_cast<size_t>(r.sink)] = i + 1;
        for (int x = 0; x < r.graph.node_count(); x++)
            if (map[static_cast<size_t>(x)] < 0) map[static_cast<size_t>(x)] = next_node++;
        for (const Edge& e : r.graph.edges())
            followers.add_edge(map[static_cast<size_t>(e.u)], map[static_cast<size_t>(e.v)],
                               e.w);
    }
    return LeaderFollowerSystem(std::move(followers), in);
}

}  // namespace spnet
