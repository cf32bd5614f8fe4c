#include "spnet/decompose.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <vector>

namespace spnet {

namespace {

// Scratch tree node used during reduction. Child references are encoded as
// ref = 2*index + flipped, so reversing a subtree's orientation is O(1) and
// the flips are applied once at materialization.
struct ScratchNode {
    bool is_leaf = true;
    JoinKind kind = JoinKind::Series;
    int c1 = -1, c2 = -1;  // encoded refs
    int u = -1, v = -1;
    double w = 0.0;
    int edge_id = -1;
    long long min_edge_id = 0;  // smallest original edge id in subtree
    int src = -1, snk = -1;     // original-graph terminal labels, unflipped
};

inline int make_ref(int idx, bool flipped) { return idx * 2 + (flipped ? 1 : 0); }
inline int ref_index(int ref) { return ref / 2; }
inline bool ref_flipped(int ref) { return ref % 2 != 0; }
inline int flip_ref(int ref) { return ref ^ 1; }

struct WorkEdge {
    int a, b;   // current endpoints; subtree oriented a -> b
    int ref;    // encoded scratch ref
    bool alive = true;
};

uint64_t pair_key(int u, int v) {
    auto [lo, hi] = std::minmax(u, v);
    return (static_cast<uint64_t>(lo) << 32) | static_cast<uint64_t>(hi);
}

class Reducer {
public:
    Reducer(const WeightedGraph& g, int source, int sink)
        : g_(g), source_(source), sink_(sink) {}

    DecompTree run() {
        if (source_ < 0 || source_ >= g_.node_count() || sink_ < 0 ||
            sink_ >= g_.node_count())
            throw Error("terminal outside graph");
        if (source_ == sink_) throw Error("source and sink must be distinct");
        if (g_.edge_count() == 0) throw Disconnected("graph has no edges");
        if (!g_.connected()) throw Disconnected("graph is disconnected");

        init();
        while (step()) {
        }
        return finish();
    }

private:
    const WeightedGraph& g_;
    int source_, sink_;

    std::vector<ScratchNode> scratch_;
    std::vector<WorkEdge> edges_;
    std::vector<std::vector<int>> incident_;  // node -> work edge ids (lazy)
    std::vector<int> degree_;
    std::unordered_map<uint64_t, std::vector<int>> by_pair_;
    std::deque<uint64_t> parallel_queue_;
    std::deque<int> series_queue_;
    int alive_edges_ = 0;

    void init() {
        const int n = g_.node_count();
        incident_.resize(static_cast<size_t>(n));
        degree_.assign(static_cast<size_t>(n), 0);
        for (const Edge& e : g_.edges()) {
            ScratchNode sn;
            sn.u = e.u;
            sn.v = e.v;
            sn.w = e.w;
            sn.edge_id = e.id;
            sn.min_edge_id = e.id;
            sn.src = e.u;
            sn.snk = e.v;
            scratch_.push_back(sn);
            int we = static_cast<int>(edges_.size());
            edges_.push_back(WorkEdge{e.u, e.v, make_ref(static_cast<int>(scratch_.size()) - 1, false), true});
            attach(we);
        }
        alive_edges_ = static_cast<int>(edges_.size());
        for (const auto& [key, ids] : by_pair_)
            if (ids.size() >= 2) parallel_queue_.push_back(key);
        // deterministic seed order
        std::sort(parallel_queue_.begin(), parallel_queue_.end());
        for (int x = 0; x < n; x++)
            if (degree_[static_cast<size_t>(x)] == 2) series_queue_.push_back(x);
    }

    void attach(int we) {
        const WorkEdge& e = edges_[static_cast<size_t>(we)];
        incident_[static_cast<size_t>(e.a)].push_back(we);
        incident_[static_cast<size_t>(e.b)].push_back(we);
        degree_[static_cast<size_t>(e.a)]++;
        degree_[static_cast<size_t>(e.b)]++;
        by_pair_[pair_key(e.a, e.b)].push_back(we);
    }

    void kill(int we) {
        edges_[static_cast<size_t>(we)].alive = false;
        degree_[static_cast<size_t>(edges_[static_cast<size_t>(we)].a)]--;
        degree_[static_cast<size_t>(edges_[static_cast<size_t>(we)].b)]--;
        alive_edges_--;
    }

    bool is_terminal(int x) const { return x == source_ || x == sink_; }

    bool step() {
        while (!parallel_queue_.empty()) {
            uint64_t key = parallel_queue_.front();
            parallel_queue_.pop_front();
            if (merge_parallel(key)) return true;
        }
        while (!series_queue_.empty()) {
            int x = series_queue_.front();
            series_queue_.pop_front();
            if (splice_series(x)) return true;
        }
        return false;
    }

    // Merge all alive parallel edges between the pair into one, folding left
    // over the edges sorted by smallest subtree edge id.
    bool merge_parallel(uint64_t key) {
        auto it = by_pair_.find(key);
        if (it == by_pair_.end()) return false;
        std::vector<int> ids;
        for (int we : it->second)
            if (edges_[static_cast<size_t>(we)].alive) ids.push_back(we);
        if (ids.size() < 2) return false;
        std::sort(ids.begin(), ids.end(), [&](int x, int y) {
            return scratch_[static_cast<size_t>(ref_index(edges_[static_cast<size_t>(x)].ref))]
                           .min_edge_id <
                   scratch_[static_cast<size_t>(ref_index(edges_[static_cast<size_t>(y)].ref))]
                           .min_edge_id;
        });

        const int u = edges_[static_cast<size_t>(ids[0])].a;
        const int v = edges_[static_cast<size_t>(ids[0])].b;
        int acc_ref = edges_[static_cast<size_t>(ids[0])].ref;
        for (size_t k = 1; k < ids.size(); k++) {
            const WorkEdge& e = edges_[static_cast<size_t>(ids[k])];
            int child = e.ref;
            if (e.a != u) child = flip_ref(child);  // align orientation to u -> v
            ScratchNode sn;
            sn.is_leaf = false;
            sn.kind = JoinKind::Parallel;
            sn.c1 = acc_ref;
            sn.c2 = child;
            sn.src = u;
            sn.snk = v;
            sn.min_edge_id =
                std::min(scratch_[static_cast<size_t>(ref_index(acc_ref))].min_edge_id,
                         scratch_[static_cast<size_t>(ref_index(child))].min_edge_id);
            scratch_.push_back(sn);
            acc_ref = make_ref(static_cast<int>(scratch_.size()) - 1, false);
        }
        for (int we : ids) kill(we);

        int we = static_cast<int>(edges_.size());
        edges_.push_back(WorkEdge{u, v, acc_ref, true});
        attach(we);
        alive_edges_++;
        // merging dropped both endpoint degrees; they may now be spliceable
        for (int x : {u, v})
            if (degree_[static_cast<size_t>(x)] == 2 && !is_terminal(x))
                series_queue_.push_back(x);
        return true;
    }

    // Splice out the degree-2 non-terminal node x, joining its two edges in
    // series.
    bool splice_series(int x) {
        if (is_terminal(x) || degree_[static_cast<size_t>(x)] != 2) return false;
        int e1 = -1, e2 = -1;
        auto& inc = incident_[static_cast<size_t>(x)];
        inc.erase(std::remove_if(inc.begin(), inc.end(),
                                 [&](int we) { return !edges_[static_cast<size_t>(we)].alive; }),
                  inc.end());
        if (inc.size() != 2) return false;
        e1 = inc[0];
        e2 = inc[1];

        const WorkEdge& w1 = edges_[static_cast<size_t>(e1)];
        const WorkEdge& w2 = edges_[static_cast<size_t>(e2)];
        int p = w1.a == x ? w1.b : w1.a;
        int q = w2.a == x ? w2.b : w2.a;
        if (p == q) return false;  // parallel pair; handled by merge rule

        int r1 = w1.ref, r2 = w2.ref;
        if (w1.b != x) r1 = flip_ref(r1);  // orient p -> x
        if (w2.a != x) r2 = flip_ref(r2);  // orient x -> q

        ScratchNode sn;
        sn.is_leaf = false;
        sn.kind = JoinKind::Series;
        sn.c1 = r1;
        sn.c2 = r2;
        sn.src = p;
        sn.snk = q;
        sn.min_edge_id = std::min(scratch_[static_cast<size_t>(ref_index(r1))].min_edge_id,
                                  scratch_[static_cast<size_t>(ref_index(r2))].min_edge_id);
        scratch_.push_back(sn);

        kill(e1);
        kill(e2);
        int we = static_cast<int>(edges_.size());
        edges_.push_back(WorkEdge{p, q, make_ref(static_cast<int>(scratch_.size()) - 1, false), true});
        attach(we);
        alive_edges_++;
        uint64_t key = pair_key(p, q);
        if (std::count_if(by_pair_[key].begin(), by_pair_[key].end(), [&](int id) {
                return edges_[static_cast<size_t>(id)].alive;
            }) >= 2)
            parallel_queue_.push_back(key);
        return true;
    }

    DecompTree finish() {
        int last = -1;
        for (int we = 0; we < static_cast<int>(edges_.size()); we++)
            if (edges_[static_cast<size_t>(we)].alive) last = we;
        int alive_nodes = 0;
        for (int d : degree_)
            if (d > 0) alive_nodes++;
        if (alive_edges_ != 1 ||
            pair_key(edges_[static_cast<size_t>(last)].a, edges_[static_cast<size_t>(last)].b) !=
                pair_key(source_, sink_)) {
            throw NotSeriesParallel(
                "graph is not series-parallel between terminals " + std::to_string(source_) +
                    " and " + std::to_string(sink_) + ": reduction stuck with " +
                    std::to_string(alive_nodes) + " nodes and " + std::to_string(alive_edges_) +
                    " edges",
                alive_nodes, alive_edges_);
        }
        int root_ref = edges_[static_cast<size_t>(last)].ref;
        if (edges_[static_cast<size_t>(last)].a != source_) root_ref = flip_ref(root_ref);
        return materialize(root_ref);
    }

    // Copy the scratch tree into a clean arena with flips applied; children
    // end up before parents since emission is post-order.
    DecompTree materialize(int root_ref) const {
        DecompTree::Raw raw;
        struct Frame {
            int ref;
            int state = 0;
            int child_idx[2] = {-1, -1};
        };
        std::vector<Frame> stack{{root_ref}};
        int finished = -1;
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const ScratchNode& sn = scratch_[static_cast<size_t>(ref_index(fr.ref))];
            const bool flip = ref_flipped(fr.ref);
            if (sn.is_leaf) {
                TreeNode n;
                n.u = flip ? sn.v : sn.u;
                n.v = flip ? sn.u : sn.v;
                n.w = sn.w;
                n.edge_id = sn.edge_id;
                raw.nodes.push_back(n);
                raw.terms.push_back(flip ? Terminals{sn.snk, sn.src} : Terminals{sn.src, sn.snk});
                finished = static_cast<int>(raw.nodes.size()) - 1;
                stack.pop_back();
                if (!stack.empty() && stack.back().state > 0)
                    stack.back().child_idx[stack.back().state - 1] = finished;
                continue;
            }
            // flipped series joins swap children and flip both; flipped
            // parallel joins just flip both children in place
            int kids[2] = {sn.c1, sn.c2};
            if (flip) {
                kids[0] = flip_ref(sn.kind == JoinKind::Series ? sn.c2 : sn.c1);
                kids[1] = flip_ref(sn.kind == JoinKind::Series ? sn.c1 : sn.c2);
            }
            if (fr.state == 0) {
                fr.state = 1;
                stack.push_back(Frame{kids[0]});
            } else if (fr.state == 1) {
                fr.state = 2;
                stack.push_back(Frame{kids[1]});
            } else {
                TreeNode n;
                n.kind = sn.kind;
                n.left = fr.child_idx[0];
                n.right = fr.child_idx[1];
                raw.nodes.push_back(n);
                raw.terms.push_back(flip ? Terminals{sn.snk, sn.src} : Terminals{sn.src, sn.snk});
                finished = static_cast<int>(raw.nodes.size()) - 1;
                stack.pop_back();
                if (!stack.empty() && stack.back().state > 0)
                    stack.back().child_idx[stack.back().state - 1] = finished;
            }
        }
        raw.root = finished;
        raw.label_count = g_.node_count();
        return DecompTree::from_raw(std::move(raw));
    }
};

}  // namespace

DecompTree decompose(const WeightedGraph& g, int source, int sink) {
    return Reducer(g, source, sink).run();
}

}  // namespace spnet
