#pragma once

#include <span>
#include <vector>

#include "spnet/decompose.hpp"
#include "spnet/graph.hpp"
#include "spnet/tree.hpp"

namespace spnet {

// Squared H2 composition rules: series joins add, parallel joins combine by
// parallel addition.
double h2_series(double a, double b);
double h2_parallel(double a, double b);

// Squared H2 norm of the single-leader system obtained by grounding the
// tree's source, with the sink as the sole input node. One bottom-up pass:
// leaves emit 1/(2w). Always equals half the effective resistance of the
// tree.
double h2_single_source(const DecompTree& t, std::span<const double> weights = {});

struct H2Value {
    double squared = 0.0;
    // input node id -> its contribution (= half the effective resistance
    // from that node to the grounded leader set)
    std::vector<std::pair<int, double>> per_source;
};

// A decomposition of the grounded graph with one input node as source and
// the identified leader node as sink.
struct SourceTree {
    int source = -1;
    DecompTree tree;
};

// Decomposes the grounded graph once per input node; throws NotAllInputTTSP
// naming the first source whose decomposition gets stuck.
std::vector<SourceTree> decompose_all_inputs(const LeaderFollowerSystem& sys);

// Squared H2 norm of the whole leader-follower system as the sum of
// per-source tree computations. `follower_weights`, when non-empty,
// overrides follower edge weights (leader edges stay at 1).
H2Value h2_all_input(const LeaderFollowerSystem& sys, std::span<const SourceTree> trees,
                     std::span<const double> follower_weights = {});

}  // namespace spnet
