#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spnet/errors.hpp"
#include "spnet/graph.hpp"

namespace spnet {

enum class JoinKind : uint8_t { Series, Parallel };

// One node of a decomposition tree, stored in an arena. Leaves correspond to
// 1-paths; internal nodes are series or parallel joins of their children.
// Invariant: children always have smaller arena indices than their parent,
// so an ascending index scan visits children first and a descending scan
// visits parents first. Every tree walk in this library relies on that
// instead of recursion.
struct TreeNode {
    int left = -1;   // -1 for leaves
    int right = -1;
    JoinKind kind = JoinKind::Series;
    int u = -1;      // leaf endpoints as given at construction
    int v = -1;
    double w = 0.0;  // leaf weight (conductance)
    int edge_id = -1;

    bool is_leaf() const { return left < 0; }
};

// Terminal labels of the subgraph a tree node realizes. Filled by
// decompose() with original graph node ids, or by realize() with fresh
// dense ids.
struct Terminals {
    int source = -1;
    int sink = -1;
};

struct TreeStats {
    long long leaves = 0;          // l
    long long parallel_joins = 0;  // p
    long long series_joins = 0;    // s
    long long tree_nodes = 0;      // n = 2l - 1
    long long height = 0;          // h
    long long realized_nodes = 0;  // N = 2l - 2p - s
    long long realized_edges = 0;  // E = l

    // Height bounds from n = 2l-1 and 2h+1 <= n <= 2^(h+1)-1, checked in
    // exact integer arithmetic: 2^(h+1) >= N+2p+s and h <= (N+2p+s)/2 - 1,
    // plus the edge-count form 2^h >= E and h <= E-1.
    bool bounds_hold() const;
};

class DecompTree {
public:
    DecompTree() = default;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int root() const { return root_; }
    bool empty() const { return root_ < 0; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const TreeNode& node(int i) const { return nodes_[static_cast<size_t>(i)]; }

    bool labeled() const { return !terms_.empty(); }
    const std::vector<Terminals>& terminals() const { return terms_; }
    const Terminals& terminals(int i) const { return terms_[static_cast<size_t>(i)]; }
    int label_count() const { return label_count_; }

    // Mutable access for the builders in this module only.
    struct Raw {
        std::vector<TreeNode> nodes;
        int root = -1;
        std::vector<Terminals> terms;
        int label_count = 0;
    };
    static DecompTree from_raw(Raw raw);

private:
    std::vector<TreeNode> nodes_;
    int root_ = -1;
    std::vector<Terminals> terms_;  // parallel to nodes_ when labeled
    int label_count_ = 0;
};

// --- construction ---------------------------------------------------------

DecompTree leaf(int u, int v, double w);
// Joins splice the second arena after the first; any prior terminal labels
// are dropped because the identifications change.
DecompTree series(DecompTree t1, DecompTree t2);
DecompTree parallel(DecompTree t1, DecompTree t2);

TreeStats tree_stats(const DecompTree& t);
long long tree_height(const DecompTree& t);

// --- realization ----------------------------------------------------------

// Assigns terminal labels if the tree has none (fresh dense ids, in leaf
// pre-order) and materializes the weighted multigraph the tree describes.
// For trees produced by decompose() the labels are the original node ids, so
// realize() reproduces the original graph exactly.
struct Realization {
    WeightedGraph graph;
    int source = -1;
    int sink = -1;
};
DecompTree label_terminals(DecompTree t);
Realization realize(DecompTree& t);       // labels t in place if needed
Realization realize(const DecompTree& t); // labels a copy if needed

// --- s-expression format ---------------------------------------------------
//
//   (e <u> <v> <w>)   leaf
//   (S <t1> <t2>)     series join
//   (P <t1> <t2>)     parallel join
//
// Whitespace-insensitive; weights printed with 17 significant digits so that
// print/parse round-trips are bit-exact.

std::string format_tree(const DecompTree& t);
DecompTree parse_tree(const std::string& text);
DecompTree read_tree_file(const std::string& path);

}  // namespace spnet
