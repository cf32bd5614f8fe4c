#include "spnet/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace spnet {

WeightedGraph WeightedGraph::build(int node_count,
                                   std::span<const std::tuple<int, int, double>> edges) {
    WeightedGraph g;
    g.node_count_ = node_count;
    g.edges_.reserve(edges.size());
    for (const auto& [u, v, w] : edges) g.add_edge(u, v, w);
    return g;
}

int WeightedGraph::add_edge(int u, int v, double w) {
    if (u == v)
        throw SelfLoop("self-loop at node " + std::to_string(u));
    if (u < 0 || v < 0)
        throw Error("negative node id");
    if (!(w > 0.0))
        throw NonPositiveWeight("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                ") has non-positive weight " + std::to_string(w));
    node_count_ = std::max(node_count_, std::max(u, v) + 1);
    int id = static_cast<int>(edges_.size());
    edges_.push_back(Edge{id, u, v, w});
    return id;
}

void WeightedGraph::set_weight(int edge_id, double w) {
    if (!(w > 0.0))
        throw NonPositiveWeight("edge " + std::to_string(edge_id) +
                                " assigned non-positive weight " + std::to_string(w));
    edges_.at(static_cast<size_t>(edge_id)).w = w;
}

bool WeightedGraph::connected() const {
    if (node_count_ <= 1) return true;
    std::vector<std::vector<int>> adj(static_cast<size_t>(node_count_));
    for (const Edge& e : edges_) {
        adj[static_cast<size_t>(e.u)].push_back(e.v);
        adj[static_cast<size_t>(e.v)].push_back(e.u);
    }
    std::vector<char> seen(static_cast<size_t>(node_count_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[static_cast<size_t>(x)]) {
            if (!seen[static_cast<size_t>(y)]) {
                seen[static_cast<size_t>(y)] = 1;
                reached++;
                stack.push_back(y);
            }
        }
    }
    return reached == node_count_;
}

double WeightedGraph::weight_sum() const {
    double s = 0;
    for (const Edge& e : edges_) s += e.w;
    return s;
}

WeightedGraph build_graph(std::span<const std::tuple<int, int, double>> edges) {
    return WeightedGraph::build(0, edges);
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        L(e.u, e.u) += e.w;
        L(e.v, e.v) += e.w;
        L(e.u, e.v) -= e.w;
        L(e.v, e.u) -= e.w;
    }
    return L;
}

LeaderFollowerSystem::LeaderFollowerSystem(WeightedGraph followers, std::vector<int> inputs)
    : followers_(std::move(followers)), inputs_(std::move(inputs)) {
    if (inputs_.empty())
        throw EmptyInputSet("leader-follower system needs at least one input node");
    std::unordered_set<int> seen;
    for (int s : inputs_) {
        if (s < 0 || s >= followers_.node_count())
            throw Error("input node " + std::to_string(s) + " outside follower graph");
        if (!seen.insert(s).second)
            throw Error("input node " + std::to_string(s) +
                        " attached to more than one leader");
    }
}

Eigen::MatrixXd grounded_matrix(const LeaderFollowerSystem& sys) {
    if (!sys.followers().connected())
        throw Disconnected("follower graph is disconnected");
    Eigen::MatrixXd A = -laplacian(sys.followers());
    for (int s : sys.inputs()) A(s, s) -= 1.0;
    return A;
}

GroundedGraph grounded_graph(const LeaderFollowerSystem& sys) {
    GroundedGraph gg;
    gg.graph = sys.followers();
    gg.ground = sys.followers().node_count();
    gg.first_leader_edge = gg.graph.edge_count();
    for (int s : sys.inputs()) gg.graph.add_edge(s, gg.ground, 1.0);
    return gg;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

GraphFile read_graph(std::istream& in) {
    GraphFile out;
    std::vector<std::tuple<int, int, double>> edges;
    std::optional<int> nodes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        auto fail = [&](const std::string& msg) {
            throw ParseError("graph file line " + std::to_string(lineno) + ": " + msg);
        };
        if (kind == "nodes") {
            int n;
            if (!(ls >> n) || n < 0) fail("expected `nodes <N>`");
            nodes = n;
        } else if (kind == "edge") {
            int u, v;
            double w;
            if (!(ls >> u >> v >> w)) fail("expected `edge <u> <v> <w>`");
            edges.emplace_back(u, v, w);
        } else if (kind == "input") {
            int s;
            if (!(ls >> s)) fail("expected `input <node>`");
            out.inputs.push_back(s);
        } else {
            fail("unknown record `" + kind + "`");
        }
    }
    out.graph = WeightedGraph::build(nodes.value_or(0), edges);
    if (nodes && out.graph.node_count() > *nodes)
        throw ParseError("graph file: edge endpoint exceeds declared node count");
    for (int s : out.inputs)
        if (s < 0 || s >= out.graph.node_count())
            throw ParseError("graph file: input node " + std::to_string(s) +
                             " outside declared nodes");
    return out;
}

GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& g, std::span<const int> inputs) {
    out << "nodes " << g.node_count() << "\n";
    for (const Edge& e : g.edges())
        out << "edge " << e.u << " " << e.v << " " << format_double(e.w) << "\n";
    for (int s : inputs) out << "input " << s << "\n";
}

}  // namespace spnet
