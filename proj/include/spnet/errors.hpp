#pragma once

#include <stdexcept>
#include <string>

namespace spnet {

// Base class for all domain errors raised by this library. CLI maps these
// to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveWeight : Error {
    explicit NonPositiveWeight(const std::string& what) : Error(what) {}
};

struct SelfLoop : Error {
    explicit SelfLoop(const std::string& what) : Error(what) {}
};

struct Disconnected : Error {
    explicit Disconnected(const std::string& what) : Error(what) {}
};

struct EmptyInputSet : Error {
    explicit EmptyInputSet(const std::string& what) : Error(what) {}
};

struct NonPositiveInput : Error {
    explicit NonPositiveInput(const std::string& what) : Error(what) {}
};

struct NonPositiveResistance : Error {
    explicit NonPositiveResistance(const std::string& what) : Error(what) {}
};

// Raised when the series-parallel reduction gets stuck before reaching a
// single source-sink edge. Carries the size of the stuck reduced graph for
// diagnostics.
struct NotSeriesParallel : Error {
    int stuck_nodes;
    int stuck_edges;
    NotSeriesParallel(const std::string& what, int nodes, int edges)
        : Error(what), stuck_nodes(nodes), stuck_edges(edges) {}
};

// Voltage disagreement at a parallel join; signals inconsistent currents,
// i.e. an internal bug, not a user error.
struct ParallelVoltageMismatch : Error {
    explicit ParallelVoltageMismatch(const std::string& what) : Error(what) {}
};

struct InfeasibleWeights : Error {
    explicit InfeasibleWeights(const std::string& what) : Error(what) {}
};

struct NotAllInputTTSP : Error {
    int failing_source;
    NotAllInputTTSP(const std::string& what, int source)
        : Error(what), failing_source(source) {}
};

struct MissingTree : Error {
    explicit MissingTree(const std::string& what) : Error(what) {}
};

struct SingularA : Error {
    explicit SingularA(const std::string& what) : Error(what) {}
};

struct SingularLyapunov : Error {
    explicit SingularLyapunov(const std::string& what) : Error(what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace spnet
