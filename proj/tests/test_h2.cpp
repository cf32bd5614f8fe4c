#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "spnet/electrical.hpp"
#include "spnet/h2.hpp"
#include "spnet/oracle.hpp"
#include "spnet/random_gen.hpp"

using namespace spnet;
using spnet::testing::random_connected_graph;
using spnet::testing::rel_err;
using spnet::testing::replace_subtree_with_leaf;

TEST_CASE("series composition rule") {
    CHECK(h2_series(0.5, 0.5) == 1.0);
    CHECK(h2_series(h2_series(0.25, 0.5), 1.0) == h2_series(0.25, h2_series(0.5, 1.0)));
    CHECK(h2_series(0.1, 0.2) == h2_series(0.2, 0.1));
    CHECK_THROWS_AS(h2_series(0.0, 1.0), NonPositiveInput);

    // two unit 1-paths in series = grounded 3-node path, B selects the sink
    WeightedGraph path =
        build_graph(std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}, {1, 2, 1.0}});
    oracle::DenseSystem sys = oracle::grounded_dense_system(path, 0, std::vector<int>{2});
    CHECK(rel_err(oracle::h2_dense(sys), 1.0) < 1e-12);
}

TEST_CASE("parallel composition rule") {
    CHECK(h2_parallel(0.5, 0.5) == 0.25);
    // dense check: two parallel unit edges grounded at one end, A = [-2]
    WeightedGraph pp =
        build_graph(std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}, {0, 1, 1.0}});
    oracle::DenseSystem sys = oracle::grounded_dense_system(pp, 0, std::vector<int>{1});
    CHECK(sys.A(0, 0) == -2.0);
    CHECK(rel_err(oracle::h2_dense(sys), 0.25) < 1e-14);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 30; i++) {
        double x = log_uniform(rng, 0.01, 10.0), y = log_uniform(rng, 0.01, 10.0);
        CHECK(h2_parallel(x, y) < std::min(x, y));
    }
    // triangle from adjacent terminals
    CHECK(rel_err(h2_parallel(h2_series(0.5, 0.5), 0.5), 1.0 / 3.0) < 1e-15);
}

TEST_CASE("single-source pass base cases") {
    CHECK(h2_single_source(leaf(0, 1, 2.0)) == 0.25);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> ls(1, 120);
    for (int trial = 0; trial < 60; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        CHECK(rel_err(h2_single_source(t), 0.5 * effective_resistance(t)) <= 1e-12);
    }
}

TEST_CASE("single-source pass matches the dense oracle on realized trees") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ls(1, 100);
    for (int trial = 0; trial < 40; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        Realization r = realize(t);
        // ground the source; B selects the sink
        oracle::DenseSystem sys =
            oracle::grounded_dense_system(r.graph, r.source, std::vector<int>{r.sink});
        CHECK(rel_err(h2_single_source(t), oracle::h2_dense(sys)) <= 1e-9);
    }
}

TEST_CASE("substituting a subtree by its equivalent 1-path preserves the norm") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> ls(2, 60);
    for (int trial = 0; trial < 40; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        auto r = resistance_pass(t);
        std::vector<int> internals;
        for (int i = 0; i < t.size(); i++)
            if (!t.node(i).is_leaf() && i != t.root()) internals.push_back(i);
        if (internals.empty()) continue;
        std::uniform_int_distribution<int> pick(0, static_cast<int>(internals.size()) - 1);
        const int j = internals[static_cast<size_t>(pick(rng))];
        DecompTree sub = replace_subtree_with_leaf(t, j, 1.0 / r[static_cast<size_t>(j)]);
        CHECK(rel_err(h2_single_source(sub), h2_single_source(t)) <= 1e-12);
    }
}

TEST_CASE("two-input anchor system") {
    // leader node attached to both endpoints of a unit follower edge
    LeaderFollowerSystem sys(
        build_graph(std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}}), {0, 1});
    std::vector<SourceTree> trees = decompose_all_inputs(sys);
    H2Value v = h2_all_input(sys, trees);
    REQUIRE(v.per_source.size() == 2);
    CHECK(rel_err(v.per_source[0].second, 1.0 / 3.0) < 1e-15);
    CHECK(rel_err(v.per_source[1].second, 1.0 / 3.0) < 1e-15);
    CHECK(rel_err(v.squared, 2.0 / 3.0) < 1e-15);
    CHECK(rel_err(oracle::h2_dense(oracle::dense_system(sys)), 2.0 / 3.0) < 1e-14);
}

TEST_CASE("trivial single-input system") {
    LeaderFollowerSystem sys(WeightedGraph::build(1, {}), {0});
    std::vector<SourceTree> trees = decompose_all_inputs(sys);
    H2Value v = h2_all_input(sys, trees);
    CHECK(v.squared == 0.5);
}

TEST_CASE("doubling weights halves the norm on follower-only trees") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ls(1, 50);
    for (int trial = 0; trial < 20; trial++) {
        DecompTree t = label_terminals(random_tree(rng, ls(rng)));
        std::vector<double> w(static_cast<size_t>(tree_stats(t).leaves));
        for (int i = 0; i < t.size(); i++)
            if (t.node(i).is_leaf()) w[static_cast<size_t>(t.node(i).edge_id)] = t.node(i).w;
        std::vector<double> w2 = w;
        for (double& x : w2) x *= 2.0;
        CHECK(rel_err(h2_single_source(t, w2), 0.5 * h2_single_source(t, w)) <= 1e-12);
    }
}

TEST_CASE("all-input value agrees with the dense routes on random systems") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; trial++) {
        std::uniform_int_distribution<int> ms(1, 8);
        LeaderFollowerSystem sys = random_all_input_system(rng, ms(rng));
        std::vector<SourceTree> trees = decompose_all_inputs(sys);
        H2Value v = h2_all_input(sys, trees);
        oracle::DenseSystem ds = oracle::dense_system(sys);
        CHECK(rel_err(v.squared, oracle::h2_dense(ds)) <= 1e-9);
        CHECK(rel_err(v.squared, oracle::h2_gramian(ds)) <= 1e-9);
        // Lemma-style identity: each contribution is half a resistance
        GroundedGraph gg = grounded_graph(sys);
        for (auto [s, contrib] : v.per_source) {
            CHECK(contrib > 0.0);
            CHECK(rel_err(contrib,
                          0.5 * oracle::effective_resistance_dense(gg.graph, s, gg.ground)) <=
                  1e-9);
        }
    }
}

TEST_CASE("missing and failing decompositions raise the named errors") {
    LeaderFollowerSystem sys(
        build_graph(std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}}), {0, 1});
    std::vector<SourceTree> trees = decompose_all_inputs(sys);
    trees.pop_back();
    CHECK_THROWS_AS(h2_all_input(sys, trees), MissingTree);

    // K4 among followers, all inputs: grounding cannot make it series-parallel
    std::vector<std::tuple<int, int, double>> e;
    for (int i = 0; i < 4; i++)
        for (int j = i + 1; j < 4; j++) e.emplace_back(i, j, 1.0);
    LeaderFollowerSystem bad(build_graph(e), {0, 1, 2, 3});
    CHECK_THROWS_AS(decompose_all_inputs(bad), NotAllInputTTSP);
    try {
        decompose_all_inputs(bad);
    } catch (const NotAllInputTTSP& ex) {
        CHECK(ex.failing_source == 0);
    }
}
