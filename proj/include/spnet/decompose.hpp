#pragma once

#include "spnet/graph.hpp"
#include "spnet/tree.hpp"

namespace spnet {

// Series-parallel recognition by iterative reduction: repeatedly merge
// parallel edge pairs and splice out degree-2 non-terminal nodes, recording
// each move as a Parallel/Series join of the merged edges' trees. The graph
// is TTSP between the terminals iff the reduction ends with a single
// source-sink edge.
//
// The result is deterministic: reductions are processed in work-queue order
// seeded by ascending node/pair id, and parallel joins order their children
// by the smallest original edge id in each subtree. Leaf weights and edge
// ids are the original ones, and every tree node carries the original graph
// node ids as terminal labels, so realize() reproduces the input graph.
//
// Throws Disconnected or NotSeriesParallel (with the stuck reduced graph
// size in the exception).
DecompTree decompose(const WeightedGraph& g, int source, int sink);

}  // namespace spnet
