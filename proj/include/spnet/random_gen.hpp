#pragma once

#include <random>

#include "spnet/graph.hpp"
#include "spnet/tree.hpp"

namespace spnet {

struct TreeGenOptions {
    double parallel_prob = 0.5;  // join-kind coin
    double w_min = 0.1;          // leaf weights log-uniform in [w_min, w_max]
    double w_max = 10.0;
};

double log_uniform(std::mt19937_64& rng, double lo, double hi);

// Uniform over complete binary tree shapes with the given leaf count
// (Remy's insertion algorithm), join kinds by biased coin.
DecompTree random_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts = {});

// Pairwise-halving shape: height = ceil(log2 leaves).
DecompTree balanced_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts = {});

// Left-leaning chain of joins: height = leaves - 1.
DecompTree chain_tree(std::mt19937_64& rng, int leaves, const TreeGenOptions& opts = {});

// Random all-input TTSP leader-follower system: the inputs form a chain
// 0..inputs-1 and each consecutive pair is bridged by the realization of a
// small random tree (fresh internal nodes). The grounded graph is TTSP from
// every input to the identified leader node. inputs == 1 yields the trivial
// one-node system.
LeaderFollowerSystem random_all_input_system(std::mt19937_64& rng, int inputs,
                                             int max_blob_leaves = 8,
                                             const TreeGenOptions& opts = {});

}  // namespace spnet
