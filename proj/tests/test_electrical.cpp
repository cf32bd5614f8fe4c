#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "spnet/decompose.hpp"
#include "spnet/electrical.hpp"
#include "spnet/oracle.hpp"
#include "spnet/random_gen.hpp"

using namespace spnet;
using spnet::testing::err_with_floor;
using spnet::testing::rel_err;

TEST_CASE("parallel addition") {
    CHECK(parallel_add(1.0, 1.0) == 0.5);
    CHECK(rel_err(parallel_add(2.0, 1.0), 2.0 / 3.0) < 1e-15);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; i++) {
        double a = log_uniform(rng, 0.01, 100.0), b = log_uniform(rng, 0.01, 100.0);
        CHECK(parallel_add(a, b) == parallel_add(b, a));
        CHECK(parallel_add(a, b) < std::min(a, b));
    }
    CHECK_THROWS_AS(parallel_add(0.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(parallel_add(1.0, -2.0), NonPositiveInput);
}

TEST_CASE("current split") {
    auto [a1, a2] = current_split(1.0, 1.0, 1.0);
    CHECK(a1 == 0.5);
    CHECK(a2 == 0.5);
    CHECK(a1 * a1 * 1.0 + a2 * a2 * 1.0 == 0.5);

    auto [b1, b2] = current_split(1.0, 1.0, 3.0);
    CHECK(b1 == 0.75);
    CHECK(b2 == 0.25);
    CHECK(rel_err(b1 * b1 * 1.0 + b2 * b2 * 3.0, 0.75) < 1e-15);  // = i^2 (r1:r2)

    auto [z1, z2] = current_split(0.0, 2.0, 5.0);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);
    CHECK_THROWS_AS(current_split(1.0, 0.0, 1.0), NonPositiveResistance);

    // stationarity of the optimal split: i1 r1 = i2 r2
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; t++) {
        double i = log_uniform(rng, 0.1, 10.0);
        double r1 = log_uniform(rng, 0.01, 100.0), r2 = log_uniform(rng, 0.01, 100.0);
        auto [i1, i2] = current_split(i, r1, r2);
        CHECK(rel_err(i1 * r1, i2 * r2) < 1e-12);
        CHECK(std::abs(i1 + i2 - i) <= 1e-14 * i);
    }
}

TEST_CASE("effective resistance base cases") {
    CHECK(effective_resistance(leaf(0, 1, 2.0)) == 0.5);
    DecompTree tri = parallel(series(leaf(0, 1, 1.0), leaf(1, 2, 1.0)), leaf(0, 2, 1.0));
    CHECK(rel_err(effective_resistance(tri), 2.0 / 3.0) < 1e-15);
}

TEST_CASE("resistance matches the pseudoinverse oracle on random trees") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ls(1, 200);
    for (int trial = 0; trial < 40; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        Realization r = realize(t);
        double want = oracle::effective_resistance_dense(r.graph, r.source, r.sink);
        CHECK(rel_err(effective_resistance(t), want) <= 1e-9);
    }
}

TEST_CASE("branch currents") {
    // series chain: every leaf carries the injected current
    std::mt19937_64 rng(4);
    DecompTree chain = leaf(0, 1, log_uniform(rng, 0.1, 10.0));
    for (int i = 0; i < 10; i++)
        chain = series(std::move(chain), leaf(0, 1, log_uniform(rng, 0.1, 10.0)));
    auto rpass = resistance_pass(chain);
    auto cur = current_pass(chain, rpass, 2.25);
    for (int i = 0; i < chain.size(); i++)
        if (chain.node(i).is_leaf()) CHECK(cur[static_cast<size_t>(i)] == 2.25);

    // triangle from adjacent terminals: direct edge 2/3 A, two-edge path 1/3 A
    DecompTree tri = parallel(series(leaf(0, 1, 1.0), leaf(1, 2, 1.0)), leaf(0, 2, 1.0));
    auto rt = resistance_pass(tri);
    auto ct = current_pass(tri, rt, 1.0);
    const TreeNode& root = tri.node(tri.root());
    CHECK(rel_err(ct[static_cast<size_t>(root.left)], 1.0 / 3.0) < 1e-15);
    CHECK(rel_err(ct[static_cast<size_t>(root.right)], 2.0 / 3.0) < 1e-15);
}

TEST_CASE("current conservation at every parallel join") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ls(2, 120);
    for (int trial = 0; trial < 50; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        auto r = resistance_pass(t);
        auto c = current_pass(t, r, 1.0);
        for (int i = 0; i < t.size(); i++) {
            const TreeNode& n = t.node(i);
            if (n.is_leaf()) continue;
            const double ci = c[static_cast<size_t>(i)];
            const double cl = c[static_cast<size_t>(n.left)];
            const double cr = c[static_cast<size_t>(n.right)];
            if (n.kind == JoinKind::Parallel)
                CHECK(std::abs(cl + cr - ci) <= 1e-13 * std::max(1.0, std::abs(ci)));
            else
                CHECK(cl == ci);
        }
    }
}

TEST_CASE("voltage drops") {
    // a 2-S leaf carrying 1 A drops 0.5 V
    DecompTree l2 = leaf(0, 1, 2.0);
    auto r = resistance_pass(l2);
    auto c = current_pass(l2, r, 1.0);
    auto v = voltage_pass(l2, c);
    CHECK(v[0] == 0.5);

    // root drop is i * r_eff on random trees
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> ls(1, 100);
    for (int trial = 0; trial < 50; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        double i_total = log_uniform(rng, 0.1, 10.0);
        auto rp = resistance_pass(t);
        auto cp = current_pass(t, rp, i_total);
        auto vp = voltage_pass(t, cp);
        CHECK(rel_err(vp[static_cast<size_t>(t.root())],
                      i_total * rp[static_cast<size_t>(t.root())]) <= 1e-12);
    }

    DecompTree tri = parallel(series(leaf(0, 1, 1.0), leaf(1, 2, 1.0)), leaf(0, 2, 1.0));
    auto sol = solve_network(tri);
    CHECK(rel_err(sol.v_drop[static_cast<size_t>(tri.root())], 2.0 / 3.0) < 1e-15);
}

TEST_CASE("ohm's law holds at every tree node") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> ls(1, 100);
    for (int trial = 0; trial < 40; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        const double i_total = log_uniform(rng, 0.1, 10.0);
        auto r = resistance_pass(t);
        auto c = current_pass(t, r, i_total);
        auto v = voltage_pass(t, c);
        for (int i = 0; i < t.size(); i++) {
            const size_t k = static_cast<size_t>(i);
            CHECK(rel_err(v[k], c[k] * r[k]) <= 1e-12);
            CHECK(r[k] > 0.0);
        }
    }
}

TEST_CASE("corrupted currents trip the parallel voltage check") {
    DecompTree t = parallel(leaf(0, 1, 1.0), leaf(0, 1, 2.0));
    auto r = resistance_pass(t);
    auto c = current_pass(t, r, 1.0);
    c[0] = c[0] * 1.5;  // tamper with one branch
    CHECK_THROWS_AS(voltage_pass(t, c), ParallelVoltageMismatch);
}

TEST_CASE("node potentials on the grounded path") {
    // source t -- m -- ground, unit weights, 1 A at t: y_t = 2, y_m = 1
    DecompTree t = series(leaf(10, 11, 1.0), leaf(11, 12, 1.0));
    Realization r = realize(t);
    ElectricalSolution sol = solve_network(t);
    CHECK(rel_err(sol.potential[static_cast<size_t>(r.source)], 2.0) < 1e-15);
    CHECK(rel_err(sol.potential[1], 1.0) < 1e-15);  // middle node
    CHECK(sol.potential[static_cast<size_t>(r.sink)] == 0.0);
}

TEST_CASE("potentials live in [0, root drop] and match the dense solve") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> ls(1, 80);
    for (int trial = 0; trial < 40; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        Realization r = realize(t);
        ElectricalSolution sol = solve_network(t);
        const double vmax = sol.v_drop[static_cast<size_t>(t.root())];
        for (double p : sol.potential) {
            CHECK(p >= -1e-12 * std::max(1.0, vmax));
            CHECK(p <= vmax * (1 + 1e-12) + 1e-12);
        }
        // dense reference: ground the sink, inject at the source
        oracle::DenseSystem ds = oracle::grounded_dense_system(
            r.graph, r.sink, std::vector<int>{r.source});
        Eigen::VectorXd y = oracle::voltages_dense(ds, r.source);
        for (int node = 0; node < r.graph.node_count(); node++) {
            double want = node == r.sink ? 0.0 : y(ds.row_of(node));
            CHECK(err_with_floor(sol.potential[static_cast<size_t>(node)], want, 1e-12) <=
                  1e-9);
        }
    }
}

TEST_CASE("potentials on decomposed systems are keyed by the original node ids") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; trial++) {
        std::uniform_int_distribution<int> ms(2, 6);
        LeaderFollowerSystem sys = random_all_input_system(rng, ms(rng));
        GroundedGraph gg = grounded_graph(sys);
        oracle::DenseSystem ds = oracle::dense_system(sys);
        for (int s : sys.inputs()) {
            DecompTree t = decompose(gg.graph, s, gg.ground);
            ElectricalSolution sol = solve_network(t);
            Eigen::VectorXd y = oracle::voltages_dense(ds, s);
            for (int node = 0; node < sys.followers().node_count(); node++)
                CHECK(err_with_floor(sol.potential[static_cast<size_t>(node)], y(node),
                                     1e-12) <= 1e-9);
            CHECK(sol.potential[static_cast<size_t>(gg.ground)] == 0.0);
        }
    }
}

TEST_CASE("energy identity on random trees") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> ls(1, 150);
    for (int trial = 0; trial < 60; trial++) {
        DecompTree t = random_tree(rng, ls(rng));
        const double i_total = log_uniform(rng, 0.1, 10.0);
        auto r = resistance_pass(t);
        auto c = current_pass(t, r, i_total);
        double dissipated = 0.0;
        for (int i = 0; i < t.size(); i++) {
            const TreeNode& n = t.node(i);
            if (n.is_leaf())
                dissipated += c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)] / n.w;
        }
        CHECK(rel_err(dissipated, i_total * i_total * r[static_cast<size_t>(t.root())]) <=
              1e-10);
    }
}

TEST_CASE("raising one leaf weight never raises the root resistance") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> ls(1, 60);
    for (int trial = 0; trial < 30; trial++) {
        DecompTree t = label_terminals(random_tree(rng, ls(rng)));
        std::vector<double> w(static_cast<size_t>(tree_stats(t).leaves));
        for (int i = 0; i < t.size(); i++)
            if (t.node(i).is_leaf()) w[static_cast<size_t>(t.node(i).edge_id)] = t.node(i).w;
        const double base = effective_resistance(t, w);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(w.size()) - 1);
        const int e = pick(rng);
        w[static_cast<size_t>(e)] *= 1.7;
        CHECK(effective_resistance(t, w) <= base * (1 + 1e-12));
    }
}

TEST_CASE("weight override mirrors rebuilt trees") {
    DecompTree t = parallel(series(leaf(0, 1, 1.0), leaf(1, 2, 1.0)), leaf(0, 2, 1.0));
    t = label_terminals(std::move(t));
    std::vector<double> w{2.0, 3.0, 5.0};  // by assigned edge id (leaf pre-order)
    DecompTree rebuilt =
        parallel(series(leaf(0, 1, 2.0), leaf(1, 2, 3.0)), leaf(0, 2, 5.0));
    CHECK(rel_err(effective_resistance(t, w), effective_resistance(rebuilt)) < 1e-15);
}

TEST_CASE("round counts") {
    CHECK(round_count(leaf(0, 1, 1.0)) == 1);
    std::mt19937_64 rng(10);
    CHECK(round_count(balanced_tree(rng, 1 << 6)) == 7);  // 2^k leaves -> k+1 rounds
    CHECK(round_count(chain_tree(rng, 40)) == 40);        // E leaves -> E rounds
}
