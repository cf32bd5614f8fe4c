#include "spnet/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace spnet {

namespace {

void validate_leaf(int u, int v, double w) {
    if (u == v) throw SelfLoop("1-path needs two distinct vertices, got " + std::to_string(u));
    if (!(w > 0.0))
        throw NonPositiveWeight("leaf weight must be positive, got " + std::to_string(w));
}

}  // namespace

DecompTree DecompTree::from_raw(Raw raw) {
    DecompTree t;
    const int n = static_cast<int>(raw.nodes.size());
    if (raw.root < 0 || raw.root >= n) throw Error("tree root out of range");
    for (int i = 0; i < n; i++) {
        const TreeNode& nd = raw.nodes[static_cast<size_t>(i)];
        if (nd.is_leaf()) {
            if (nd.right >= 0) throw Error("tree node has exactly one child");
        } else if (nd.left >= i || nd.right >= i || nd.right < 0) {
            throw Error("tree arena violates child-before-parent ordering");
        }
    }
    t.nodes_ = std::move(raw.nodes);
    t.root_ = raw.root;
    t.terms_ = std::move(raw.terms);
    t.label_count_ = raw.label_count;
    return t;
}

DecompTree leaf(int u, int v, double w) {
    validate_leaf(u, v, w);
    DecompTree::Raw raw;
    TreeNode n;
    n.u = u;
    n.v = v;
    n.w = w;
    raw.nodes.push_back(n);
    raw.root = 0;
    return DecompTree::from_raw(std::move(raw));
}

static DecompTree join(DecompTree t1, DecompTree t2, JoinKind kind) {
    if (t1.empty() || t2.empty()) throw Error("join of empty tree");
    DecompTree::Raw raw;
    raw.nodes.reserve(static_cast<size_t>(t1.size() + t2.size()) + 1);
    raw.nodes = t1.nodes();
    const int offset = t1.size();
    for (const TreeNode& n : t2.nodes()) {
        TreeNode m = n;
        if (!m.is_leaf()) {
            m.left += offset;
            m.right += offset;
        }
        raw.nodes.push_back(m);
    }
    TreeNode root;
    root.kind = kind;
    root.left = t1.root();
    root.right = t2.root() + offset;
    raw.nodes.push_back(root);
    raw.root = static_cast<int>(raw.nodes.size()) - 1;
    return DecompTree::from_raw(std::move(raw));
}

DecompTree series(DecompTree t1, DecompTree t2) {
    return join(std::move(t1), std::move(t2), JoinKind::Series);
}

DecompTree parallel(DecompTree t1, DecompTree t2) {
    return join(std::move(t1), std::move(t2), JoinKind::Parallel);
}

long long tree_height(const DecompTree& t) {
    std::vector<long long> h(static_cast<size_t>(t.size()), 0);
    for (int i = 0; i < t.size(); i++) {
        const TreeNode& n = t.node(i);
        if (!n.is_leaf())
            h[static_cast<size_t>(i)] =
                1 + std::max(h[static_cast<size_t>(n.left)], h[static_cast<size_t>(n.right)]);
    }
    return h[static_cast<size_t>(t.root())];
}

TreeStats tree_stats(const DecompTree& t) {
    TreeStats st;
    for (int i = 0; i < t.size(); i++) {
        const TreeNode& n = t.node(i);
        if (n.is_leaf())
            st.leaves++;
        else if (n.kind == JoinKind::Parallel)
            st.parallel_joins++;
        else
            st.series_joins++;
    }
    st.tree_nodes = 2 * st.leaves - 1;
    st.height = tree_height(t);
    st.realized_nodes = 2 * st.leaves - 2 * st.parallel_joins - st.series_joins;
    st.realized_edges = st.leaves;
    return st;
}

static bool pow2_at_least(long long exponent, long long value) {
    if (exponent >= 62) return true;
    return (1LL << exponent) >= value;
}

bool TreeStats::bounds_hold() const {
    const long long m = realized_nodes + 2 * parallel_joins + series_joins;  // = n + 1
    if (!pow2_at_least(height + 1, m)) return false;   // log2(m) - 1 <= h
    if (2 * height + 2 > m) return false;              // h <= m/2 - 1
    if (!pow2_at_least(height, realized_edges)) return false;  // log2(E) <= h
    if (height > realized_edges - 1) return false;             // h <= E - 1
    return true;
}

// --- realization -----------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<int> parent;
    int make() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

// Leaf indices in left-to-right pre-order, via an explicit stack (trees can
// be E-1 deep).
std::vector<int> leaves_preorder(const DecompTree& t) {
    std::vector<int> out;
    std::vector<int> stack{t.root()};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const TreeNode& n = t.node(i);
        if (n.is_leaf()) {
            out.push_back(i);
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return out;
}

}  // namespace

DecompTree label_terminals(DecompTree t) {
    if (t.labeled()) return t;
    const int n = t.size();
    UnionFind uf;
    std::vector<int> src_port(static_cast<size_t>(n)), snk_port(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        const TreeNode& nd = t.node(i);
        if (nd.is_leaf()) {
            src_port[static_cast<size_t>(i)] = uf.make();
            snk_port[static_cast<size_t>(i)] = uf.make();
        } else if (nd.kind == JoinKind::Series) {
            uf.unite(snk_port[static_cast<size_t>(nd.left)],
                     src_port[static_cast<size_t>(nd.right)]);
            src_port[static_cast<size_t>(i)] = src_port[static_cast<size_t>(nd.left)];
            snk_port[static_cast<size_t>(i)] = snk_port[static_cast<size_t>(nd.right)];
        } else {
            uf.unite(src_port[static_cast<size_t>(nd.left)],
                     src_port[static_cast<size_t>(nd.right)]);
            uf.unite(snk_port[static_cast<size_t>(nd.left)],
                     snk_port[static_cast<size_t>(nd.right)]);
            src_port[static_cast<size_t>(i)] = src_port[static_cast<size_t>(nd.left)];
            snk_port[static_cast<size_t>(i)] = snk_port[static_cast<size_t>(nd.right)];
        }
    }

    // Dense node labels in leaf pre-order; fresh edge ids in the same order.
    std::vector<int> label(uf.parent.size(), -1);
    int next = 0;
    DecompTree::Raw raw;
    raw.nodes = t.nodes();
    raw.root = t.root();
    for (int li : leaves_preorder(t)) {
        for (int port : {src_port[static_cast<size_t>(li)], snk_port[static_cast<size_t>(li)]}) {
            int rep = uf.find(port);
            if (label[static_cast<size_t>(rep)] < 0) label[static_cast<size_t>(rep)] = next++;
        }
    }
    int next_edge = 0;
    for (int li : leaves_preorder(t)) raw.nodes[static_cast<size_t>(li)].edge_id = next_edge++;

    raw.terms.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        raw.terms[static_cast<size_t>(i)].source =
            label[static_cast<size_t>(uf.find(src_port[static_cast<size_t>(i)]))];
        raw.terms[static_cast<size_t>(i)].sink =
            label[static_cast<size_t>(uf.find(snk_port[static_cast<size_t>(i)]))];
    }
    raw.label_count = next;
    return DecompTree::from_raw(std::move(raw));
}

Realization realize(DecompTree& t) {
    if (!t.labeled()) t = label_terminals(std::move(t));
    Realization r;
    int max_label = 0;
    std::vector<int> leaf_ids;
    for (int i = 0; i < t.size(); i++) {
        max_label = std::max({max_label, t.terminals(i).source, t.terminals(i).sink});
        if (t.node(i).is_leaf()) leaf_ids.push_back(i);
    }
    std::sort(leaf_ids.begin(), leaf_ids.end(),
              [&](int a, int b) { return t.node(a).edge_id < t.node(b).edge_id; });
    WeightedGraph g = WeightedGraph::build(max_label + 1, {});
    for (int li : leaf_ids)
        g.add_edge(t.terminals(li).source, t.terminals(li).sink, t.node(li).w);
    r.graph = std::move(g);
    r.source = t.terminals(t.root()).source;
    r.sink = t.terminals(t.root()).sink;
    return r;
}

Realization realize(const DecompTree& t) {
    DecompTree copy = t;
    return realize(copy);
}

// --- s-expression format ----------------------------------------------------

std::string format_tree(const DecompTree& t) {
    if (t.empty()) throw Error("cannot format empty tree");
    std::string out;
    // frames: (node, phase); phase 0 = open, 1 = between children, 2 = close
    std::vector<std::pair<int, int>> stack{{t.root(), 0}};
    while (!stack.empty()) {
        auto& [i, phase] = stack.back();
        const TreeNode& n = t.node(i);
        if (n.is_leaf()) {
            out += "(e " + std::to_string(n.u) + " " + std::to_string(n.v) + " " +
                   format_double(n.w) + ")";
            stack.pop_back();
            continue;
        }
        if (phase == 0) {
            out += n.kind == JoinKind::Series ? "(S " : "(P ";
            phase = 1;
            stack.emplace_back(n.left, 0);
        } else if (phase == 1) {
            out += " ";
            phase = 2;
            stack.emplace_back(n.right, 0);
        } else {
            out += ")";
            stack.pop_back();
        }
    }
    return out;
}

namespace {

struct Token {
    enum Kind { Open, Close, Atom } kind;
    std::string text;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> toks;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            i++;
        } else if (c == '(') {
            toks.push_back({Token::Open, "("});
            i++;
        } else if (c == ')') {
            toks.push_back({Token::Close, ")"});
            i++;
        } else {
            size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')')
                j++;
            toks.push_back({Token::Atom, text.substr(i, j - i)});
            i = j;
        }
    }
    return toks;
}

}  // namespace

DecompTree parse_tree(const std::string& text) {
    std::vector<Token> toks = tokenize(text);
    DecompTree::Raw raw;

    struct Frame {
        char op;                 // 'e', 'S', 'P'
        std::vector<std::string> atoms;  // for 'e'
        std::vector<int> children;       // for joins
    };
    std::vector<Frame> frames;
    int completed_root = -1;

    auto fail = [](const std::string& msg) { throw ParseError("tree: " + msg); };
    auto attach = [&](int idx) {
        if (frames.empty()) {
            if (completed_root >= 0) fail("multiple top-level expressions");
            completed_root = idx;
        } else {
            frames.back().children.push_back(idx);
        }
    };

    size_t pos = 0;
    while (pos < toks.size()) {
        const Token& tk = toks[pos];
        if (tk.kind == Token::Open) {
            pos++;
            if (pos >= toks.size() || toks[pos].kind != Token::Atom)
                fail("expected operator after `(`");
            const std::string& op = toks[pos].text;
            if (op != "e" && op != "S" && op != "P") fail("unknown operator `" + op + "`");
            frames.push_back(Frame{op[0], {}, {}});
            pos++;
        } else if (tk.kind == Token::Close) {
            if (frames.empty()) fail("unbalanced `)`");
            Frame f = std::move(frames.back());
            frames.pop_back();
            int idx;
            if (f.op == 'e') {
                if (f.atoms.size() != 3 || !f.children.empty())
                    fail("leaf needs exactly `(e <u> <v> <w>)`");
                TreeNode n;
                char* end = nullptr;
                n.u = static_cast<int>(std::strtol(f.atoms[0].c_str(), &end, 10));
                if (*end) fail("bad node id `" + f.atoms[0] + "`");
                n.v = static_cast<int>(std::strtol(f.atoms[1].c_str(), &end, 10));
                if (*end) fail("bad node id `" + f.atoms[1] + "`");
                n.w = std::strtod(f.atoms[2].c_str(), &end);
                if (*end) fail("bad weight `" + f.atoms[2] + "`");
                validate_leaf(n.u, n.v, n.w);
                idx = static_cast<int>(raw.nodes.size());
                raw.nodes.push_back(n);
            } else {
                if (f.children.size() != 2 || !f.atoms.empty())
                    fail("join needs exactly two subtrees");
                TreeNode n;
                n.kind = f.op == 'S' ? JoinKind::Series : JoinKind::Parallel;
                n.left = f.children[0];
                n.right = f.children[1];
                idx = static_cast<int>(raw.nodes.size());
                raw.nodes.push_back(n);
            }
            attach(idx);
            pos++;
        } else {
            if (frames.empty()) fail("stray atom `" + tk.text + "`");
            if (frames.back().op == 'e')
                frames.back().atoms.push_back(tk.text);
            else
                fail("joins take subtrees, not atoms");
            pos++;
        }
    }
    if (!frames.empty()) fail("unbalanced `(`");
    if (completed_root < 0) fail("empty input");
    raw.root = completed_root;
    return DecompTree::from_raw(std::move(raw));
}

DecompTree read_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open tree file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tree(ss.str());
}

}  // namespace spnet
