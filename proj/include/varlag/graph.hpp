#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace varlag {

struct LaggedEdge {
    int parent = -1;
    int child = -1;
    int lag = 1;  // always >= 1: parents live strictly in the past

    friend bool operator==(const LaggedEdge&, const LaggedEdge&) = default;
};

enum class MoveKind { Add, Delete, Reverse, ChangeLag };

const char* to_string(MoveKind kind);

struct Move {
    MoveKind kind = MoveKind::Add;
    LaggedEdge edge;
    int new_lag = 0;  // ChangeLag only

    // Total order used for neighbourhood enumeration and tie-breaking.
    std::tuple<int, int, int, int> key() const;
    friend bool operator==(const Move&, const Move&) = default;
};

std::string to_string(const Move& move);

// Compact variable-level graph: at most one lagged edge per ordered
// (parent, child) pair, self-edges allowed. Cycles across variables are fine;
// the induced time-unrolled graph is acyclic because every lag is >= 1.
class LaggedGraph {
  public:
    LaggedGraph() = default;
    explicit LaggedGraph(int n_vars);

    int n_vars() const { return n_vars_; }
    int n_edges() const { return n_edges_; }

    bool has_edge(int parent, int child) const;
    int lag_of(int parent, int child) const;  // -1 if absent

    // Parents of a child, sorted by parent index.
    const std::vector<LaggedEdge>& parents_of(int child) const;
    int max_parent_lag(int child) const;  // 0 for an orphan child

    // All edges sorted by (parent, child).
    std::vector<LaggedEdge> edges() const;

    void add_edge(int parent, int child, int lag);
    void remove_edge(int parent, int child);
    void set_lag(int parent, int child, int lag);

    friend bool operator==(const LaggedGraph&, const LaggedGraph&) = default;

  private:
    int n_vars_ = 0;
    int n_edges_ = 0;
    std::vector<std::vector<LaggedEdge>> parents_;  // indexed by child
};

bool is_admissible(const LaggedGraph& g, const Move& m, int l_max);

// Applies an admissible move. Add and Reverse initialise the (new) edge lag
// at 1; Reverse therefore does not preserve the original lag. Throws
// std::logic_error on an inadmissible move: enumeration must pre-filter.
LaggedGraph apply_move(const LaggedGraph& g, const Move& m);

// Deterministic, duplicate-free candidate list ordered by Move::key():
// every admissible Add (self-pairs included), every Delete, every Reverse of
// a non-self edge whose opposite pair is vacant, and single-step ChangeLag
// (+/-1) per edge. Size is bounded by N^2 + 3|E|.
std::vector<Move> enumerate_neighbourhood(const LaggedGraph& g, int l_max);

// Executable form of the validity guarantee: the unrolled graph is acyclic
// iff every edge lag is >= 1 (which well-formed graphs enforce by type).
bool check_unrolled_acyclic(const LaggedGraph& g);

}  // namespace varlag
