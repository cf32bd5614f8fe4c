#pragma once

#include <span>
#include <utility>
#include <vector>

#include "spnet/tree.hpp"

namespace spnet {

// Parallel addition x:y = (1/x + 1/y)^-1, restricted to positive operands.
double parallel_add(double x, double y);

// Optimal split of current i across parallel resistances r1, r2 (the
// minimizer of i1^2 r1 + i2^2 r2 with i1 + i2 = i); dissipated power equals
// i^2 (r1:r2).
std::pair<double, double> current_split(double i, double r1, double r2);

// Per-tree-node electrical quantities for a unit (or given) current driven
// from source to sink of the realized graph, plus per-graph-node potentials
// relative to the sink at 0 V.
struct ElectricalSolution {
    double i_total = 1.0;
    std::vector<double> r_eff;      // per tree node, ohms
    std::vector<double> current;    // per tree node, amperes
    std::vector<double> v_drop;     // per tree node, volts
    std::vector<double> potential;  // per graph node label, volts
};

// Each pass walks the arena once; `weights`, when non-empty, overrides leaf
// weights by edge id (used by the re-weighting loop, which keeps the tree
// and changes only weights).

// Bottom-up resistance pass; leaves emit 1/w.
std::vector<double> resistance_pass(const DecompTree& t, std::span<const double> weights = {});
double effective_resistance(const DecompTree& t, std::span<const double> weights = {});

// Top-down current pass; the root receives i_total, series joins forward,
// parallel joins split optimally.
std::vector<double> current_pass(const DecompTree& t, std::span<const double> r_eff,
                                 double i_total = 1.0);

// Bottom-up voltage pass; leaves emit i/w, series joins add, parallel joins
// check both children agree (to 1e-9 relative) and pass the value up.
std::vector<double> voltage_pass(const DecompTree& t, std::span<const double> current,
                                 std::span<const double> weights = {});

// Node potentials from voltage drops. Requires a labeled tree (realize or
// decompose first); sink of the root is at 0 V.
std::vector<double> potential_pass(const DecompTree& t, std::span<const double> v_drop);

// All four passes in sequence.
ElectricalSolution solve_network(const DecompTree& t, double i_total = 1.0,
                                 std::span<const double> weights = {});

// Synchronous rounds per tree pass (= height + 1); the resistance, current
// and voltage passes together cost 3x this.
long long round_count(const DecompTree& t);

}  // namespace spnet
