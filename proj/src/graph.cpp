#include "varlag/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace varlag {

const char* to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::Add: return "add";
        case MoveKind::Delete: return "delete";
        case MoveKind::Reverse: return "reverse";
        case MoveKind::ChangeLag: return "change_lag";
    }
    return "?";
}

std::tuple<int, int, int, int> Move::key() const {
    int result_lag = 0;
    switch (kind) {
        case MoveKind::Add:
        case MoveKind::Reverse: result_lag = 1; break;
        case MoveKind::Delete: result_lag = 0; break;
        case MoveKind::ChangeLag: result_lag = new_lag; break;
    }
    return {static_cast<int>(kind), edge.parent, edge.child, result_lag};
}

std::string to_string(const Move& move) {
    std::string s = to_string(move.kind);
    s += "(" + std::to_string(move.edge.parent) + "->" + std::to_string(move.edge.child);
    if (move.kind == MoveKind::ChangeLag) {
        s += "," + std::to_string(move.edge.lag) + "=>" + std::to_string(move.new_lag);
    }
    s += ")";
    return s;
}

LaggedGraph::LaggedGraph(int n_vars) : n_vars_(n_vars), parents_(static_cast<std::size_t>(n_vars)) {
    if (n_vars < 1) throw std::invalid_argument("graph needs at least one variable");
}

bool LaggedGraph::has_edge(int parent, int child) const { return lag_of(parent, child) >= 1; }

int LaggedGraph::lag_of(int parent, int child) const {
    if (child < 0 || child >= n_vars_ || parent < 0 || parent >= n_vars_) return -1;
    for (const auto& e : parents_[child]) {
        if (e.parent == parent) return e.lag;
    }
    return -1;
}

const std::vector<LaggedEdge>& LaggedGraph::parents_of(int child) const {
    return parents_.at(static_cast<std::size_t>(child));
}

int LaggedGraph::max_parent_lag(int child) const {
    int max_lag = 0;
    for (const auto& e : parents_of(child)) max_lag = std::max(max_lag, e.lag);
    return max_lag;
}

std::vector<LaggedEdge> LaggedGraph::edges() const {
    std::vector<LaggedEdge> all;
    all.reserve(static_cast<std::size_t>(n_edges_));
    for (const auto& list : parents_) all.insert(all.end(), list.begin(), list.end());
    std::sort(all.begin(), all.end(), [](const LaggedEdge& a, const LaggedEdge& b) {
        return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
    });
    return all;
}

void LaggedGraph::add_edge(int parent, int child, int lag) {
    if (parent < 0 || parent >= n_vars_ || child < 0 || child >= n_vars_) {
        throw std::invalid_argument("edge endpoint out of range");
    }
    if (lag < 1) throw std::invalid_argument("edge lag must be >= 1");
    if (has_edge(parent, child)) throw std::logic_error("edge already present");
    auto& list = parents_[child];
    LaggedEdge e{parent, child, lag};
    list.insert(std::upper_bound(list.begin(), list.end(), e,
                                 [](const LaggedEdge& a, const LaggedEdge& b) {
                                     return a.parent < b.parent;
                                 }),
                e);
    ++n_edges_;
}

void LaggedGraph::remove_edge(int parent, int child) {
    auto& list = parents_.at(static_cast<std::size_t>(child));
    for (auto it = list.begin(); it != list.end(); ++it) {
        if (it->parent == parent) {
            list.erase(it);
            --n_edges_;
            return;
        }
    }
    throw std::logic_error("edge not present");
}

void LaggedGraph::set_lag(int parent, int child, int lag) {
    if (lag < 1) throw std::invalid_argument("edge lag must be >= 1");
    auto& list = parents_.at(static_cast<std::size_t>(child));
    for (auto& e : list) {
        if (e.parent == parent) {
            e.lag = lag;
            return;
        }
    }
    throw std::logic_error("edge not present");
}

bool is_admissible(const LaggedGraph& g, const Move& m, int l_max) {
    const int i = m.edge.parent;
    const int j = m.edge.child;
    if (i < 0 || i >= g.n_vars() || j < 0 || j >= g.n_vars()) return false;
    switch (m.kind) {
        case MoveKind::Add:
            return !g.has_edge(i, j);
        case MoveKind::Delete:
            return g.has_edge(i, j);
        case MoveKind::Reverse:
            return i != j && g.has_edge(i, j) && !g.has_edge(j, i);
        case MoveKind::ChangeLag: {
            const int lag = g.lag_of(i, j);
            return lag >= 1 && m.new_lag >= 1 && m.new_lag <= l_max && m.new_lag != lag;
        }
    }
    return false;
}

LaggedGraph apply_move(const LaggedGraph& g, const Move& m) {
    LaggedGraph out = g;
    switch (m.kind) {
        case MoveKind::Add:
            if (g.has_edge(m.edge.parent, m.edge.child)) throw std::logic_error("add: edge present");
            out.add_edge(m.edge.parent, m.edge.child, 1);
            break;
        case MoveKind::Delete:
            out.remove_edge(m.edge.parent, m.edge.child);
            break;
        case MoveKind::Reverse:
            if (m.edge.parent == m.edge.child) throw std::logic_error("reverse: self-edge");
            if (g.has_edge(m.edge.child, m.edge.parent)) {
                throw std::logic_error("reverse: opposite edge present");
            }
            out.remove_edge(m.edge.parent, m.edge.child);
            out.add_edge(m.edge.child, m.edge.parent, 1);  // reversal re-initialises the lag
            break;
        case MoveKind::ChangeLag:
            if (m.new_lag < 1) throw std::logic_error("change_lag: lag < 1");
            out.set_lag(m.edge.parent, m.edge.child, m.new_lag);
            break;
    }
    return out;
}

std::vector<Move> enumerate_neighbourhood(const LaggedGraph& g, int l_max) {
    std::vector<Move> moves;
    const int n = g.n_vars();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!g.has_edge(i, j)) {
                moves.push_back({MoveKind::Add, {i, j, 1}, 0});
            }
        }
    }
    for (const auto& e : g.edges()) {
        moves.push_back({MoveKind::Delete, e, 0});
        if (e.parent != e.child && !g.has_edge(e.child, e.parent)) {
            moves.push_back({MoveKind::Reverse, e, 0});
        }
        if (e.lag + 1 <= l_max) moves.push_back({MoveKind::ChangeLag, e, e.lag + 1});
        if (e.lag - 1 >= 1) moves.push_back({MoveKind::ChangeLag, e, e.lag - 1});
    }
    std::sort(moves.begin(), moves.end(),
              [](const Move& a, const Move& b) { return a.key() < b.key(); });
    return moves;
}

bool check_unrolled_acyclic(const LaggedGraph& g) {
    for (const auto& e : g.edges()) {
        if (e.lag < 1) return false;
    }
    return true;
}

}  // namespace varlag
