#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spnet/errors.hpp"

namespace spnet {

struct Edge {
    int id;
    int u;
    int v;
    double w;  // conductance, > 0
};

// Undirected weighted multigraph over dense node ids 0..node_count-1.
// Parallel edges between the same node pair are kept distinct; edge ids are
// assigned in insertion order and stay stable under weight updates.
class WeightedGraph {
public:
    WeightedGraph() = default;

    static WeightedGraph build(int node_count,
                               std::span<const std::tuple<int, int, double>> edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int id) const { return edges_.at(static_cast<size_t>(id)); }

    // Single-writer weight mutation; ids and endpoints are immutable.
    void set_weight(int edge_id, double w);

    // Appends an edge and returns its id. Grows node_count if needed.
    int add_edge(int u, int v, double w);

    bool connected() const;
    double weight_sum() const;

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
};

// Convenience builder used throughout the tests: node count is inferred as
// max endpoint + 1.
WeightedGraph build_graph(std::span<const std::tuple<int, int, double>> edges);

// Graph Laplacian L = sum_e w_e a_e a_e^T.
Eigen::MatrixXd laplacian(const WeightedGraph& g);

// Leader-follower consensus system: a follower graph plus one leader per
// input node, each leader attached to its input by a unit-weight edge.
// Leaders live outside the follower id space; leader k is identified with
// inputs()[k].
class LeaderFollowerSystem {
public:
    LeaderFollowerSystem(WeightedGraph followers, std::vector<int> inputs);

    const WeightedGraph& followers() const { return followers_; }
    WeightedGraph& followers() { return followers_; }
    const std::vector<int>& inputs() const { return inputs_; }
    int leader_count() const { return static_cast<int>(inputs_.size()); }

private:
    WeightedGraph followers_;
    std::vector<int> inputs_;  // distinct follower node ids, one per leader
};

// Grounded system matrix A = -(L_followers + sum_{i in R} e_i e_i^T).
// Symmetric negative definite whenever the follower graph is connected.
Eigen::MatrixXd grounded_matrix(const LeaderFollowerSystem& sys);

// The electrically grounded graph: followers plus one extra node (the
// identified leader set) with a unit edge to every input node. Returns the
// graph and the id of the ground node (== follower node_count). Leader edges
// get ids following the follower edge ids.
struct GroundedGraph {
    WeightedGraph graph;
    int ground;
    int first_leader_edge;  // edge ids >= this are leader edges (weight 1)
};
GroundedGraph grounded_graph(const LeaderFollowerSystem& sys);

// --- text format ---------------------------------------------------------
//
//   # comment
//   nodes <N>
//   edge <u> <v> <w>
//   input <node>
//
// One record per line, `#` starts a comment, weights are decimal floats.

struct GraphFile {
    WeightedGraph graph;
    std::vector<int> inputs;
};

GraphFile read_graph(std::istream& in);
GraphFile read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& g,
                 std::span<const int> inputs = {});

// 17-significant-digit decimal formatting used by every text format here;
// round-trips doubles exactly.
std::string format_double(double x);

}  // namespace spnet
