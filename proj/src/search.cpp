#include "varlag/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace varlag {

TabuList::Signature TabuList::signature(const Move& m) {
    return {static_cast<int>(m.kind), m.edge.parent, m.edge.child};
}

Move TabuList::inverse(const Move& m) {
    switch (m.kind) {
        case MoveKind::Add: return {MoveKind::Delete, m.edge, 0};
        case MoveKind::Delete: return {MoveKind::Add, m.edge, 0};
        case MoveKind::Reverse:
            return {MoveKind::Reverse, {m.edge.child, m.edge.parent, 1}, 0};
        case MoveKind::ChangeLag: return {MoveKind::ChangeLag, m.edge, m.edge.lag};
    }
    return m;
}

void TabuList::push(const Move& taken, int tenure) {
    if (tenure <= 0) return;
    entries_[signature(inverse(taken))] = tenure;
}

void TabuList::decay() {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (--(it->second) <= 0) {
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
}

bool TabuList::contains(const Move& m) const { return entries_.count(signature(m)) > 0; }

namespace {

// Local-score memo for one child's lag-tuning loop; avoids refitting lag
// assignments revisited across passes.
class ChildScoreProbe {
  public:
    ChildScoreProbe(const ScoreEngine& engine, int child) : engine_(engine), child_(child) {}

    double local_score(const std::vector<std::pair<int, int>>& parents) {
        std::string key;
        for (const auto& [p, l] : parents) {
            key += std::to_string(p);
            key += ',';
            key += std::to_string(l);
            key += ';';
        }
        const auto it = seen_.find(key);
        if (it != seen_.end()) return it->second;
        const double s = engine_.score_node(child_, parents).local_score;
        seen_.emplace(std::move(key), s);
        return s;
    }

  private:
    const ScoreEngine& engine_;
    int child_;
    std::unordered_map<std::string, double> seen_;
};

}  // namespace

LaggedGraph greedy_lag_tune(const ScoreEngine& engine, const LaggedGraph& g, int child,
                            int l_max) {
    LaggedGraph tuned = g;
    const auto& incoming = tuned.parents_of(child);
    if (incoming.empty()) return tuned;

    ChildScoreProbe probe(engine, child);
    auto parents = ScoreEngine::canonical_parents(tuned, child);
    double current = probe.local_score(parents);

    std::vector<int> parent_ids;
    parent_ids.reserve(incoming.size());
    for (const auto& e : incoming) parent_ids.push_back(e.parent);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int pid : parent_ids) {
            const int lag = tuned.lag_of(pid, child);
            int best_lag = lag;
            double best = current;
            auto trial = [&](int candidate_lag) {
                auto trial_parents = parents;
                for (auto& [p, l] : trial_parents) {
                    if (p == pid) l = candidate_lag;
                }
                std::sort(trial_parents.begin(), trial_parents.end());
                return probe.local_score(trial_parents);
            };
            if (lag + 1 <= l_max) {
                const double up = trial(lag + 1);
                if (up > best) {
                    best = up;
                    best_lag = lag + 1;
                }
            }
            if (lag - 1 >= 1) {
                const double down = trial(lag - 1);
                if (down > best) {
                    best = down;
                    best_lag = lag - 1;
                }
            }
            if (best_lag != lag) {
                tuned.set_lag(pid, child, best_lag);
                for (auto& [p, l] : parents) {
                    if (p == pid) l = best_lag;
                }
                std::sort(parents.begin(), parents.end());
                current = best;
                changed = true;
            }
        }
    }
    return tuned;
}

namespace {

std::vector<int> touched_children(const Move& m) {
    if (m.kind == MoveKind::Reverse) return {m.edge.parent, m.edge.child};
    return {m.edge.child};
}

// Children whose incoming lags get re-tuned after the move is applied.
std::vector<int> children_to_tune(const Move& m, const SearchConfig& cfg) {
    switch (m.kind) {
        case MoveKind::Add: return {m.edge.child};
        case MoveKind::Delete: return {};
        case MoveKind::Reverse:
            if (cfg.retune_both_on_reverse && m.edge.parent != m.edge.child) {
                return {m.edge.parent, m.edge.child};
            }
            return {m.edge.parent};  // the reversed edge's new child
        case MoveKind::ChangeLag:
            if (cfg.tune_after_changelag) return {m.edge.child};
            return {};
    }
    return {};
}

CandidateOutcome finish_outcome(const ScoreEngine& engine, LaggedGraph graph, const Move& m,
                                const std::vector<NodeScoreCard>& cards, std::size_t index) {
    CandidateOutcome out;
    out.move_index = index;
    std::vector<NodeScoreCard> updated = cards;
    for (int child : touched_children(m)) {
        updated[static_cast<std::size_t>(child)] = engine.score_node(graph, child);
    }
    out.total_score = ScoreEngine::total_of(updated);
    out.admissible = std::isfinite(out.total_score);
    for (int child : touched_children(m)) {
        out.changed_cards.push_back(updated[static_cast<std::size_t>(child)]);
    }
    out.graph = std::move(graph);
    return out;
}

}  // namespace

CandidateOutcome evaluate_candidate(const ScoreEngine& engine, const LaggedGraph& g,
                                    const std::vector<NodeScoreCard>& cards, const Move& m,
                                    const SearchConfig& cfg, std::size_t move_index) {
    LaggedGraph moved = apply_move(g, m);
    if (cfg.tune_candidates) {
        for (int child : children_to_tune(m, cfg)) {
            moved = greedy_lag_tune(engine, moved, child, cfg.l_max);
        }
    }
    return finish_outcome(engine, std::move(moved), m, cards, move_index);
}

namespace {

struct SearchState {
    LaggedGraph graph;
    std::vector<NodeScoreCard> cards;
    double total = kMinusInfScore;
};

void remember_batch(ScoreEngine& engine, const CandidateBatch& batch) {
    for (const auto& outcome : batch.results) {
        for (const auto& card : outcome.changed_cards) {
            if (card.admissible) {
                engine.remember(card, ScoreEngine::canonical_parents(outcome.graph, card.child));
            }
        }
    }
}

void apply_outcome(ScoreEngine& engine, SearchState& state, const CandidateOutcome& winner,
                   const Move& m, const SearchConfig& cfg) {
    state.graph = winner.graph;
    std::vector<NodeScoreCard> cards = winner.changed_cards;
    if (!cfg.tune_candidates) {
        // Fast mode: tuning was deferred to the selected move.
        for (int child : children_to_tune(m, cfg)) {
            state.graph = greedy_lag_tune(engine, state.graph, child, cfg.l_max);
        }
        cards.clear();
        for (int child : touched_children(m)) {
            cards.push_back(engine.score_node(state.graph, child));
        }
    }
    for (const auto& card : cards) {
        state.cards[static_cast<std::size_t>(card.child)] = card;
        if (card.admissible) {
            engine.remember(card, ScoreEngine::canonical_parents(state.graph, card.child));
        }
    }
    state.total = ScoreEngine::total_of(state.cards);
}

}  // namespace

std::pair<LaggedGraph, SearchTrace> hill_climb(ScoreEngine& engine, const SearchConfig& cfg) {
    const int n = engine.dataset().n_vars;
    SearchState state;
    state.graph = LaggedGraph(n);
    std::tie(state.total, state.cards) = engine.score_graph(state.graph);

    SearchTrace trace;
    trace.initial_score = state.total;
    trace.best_graph = state.graph;
    trace.best_score = state.total;

    std::uint64_t snapshot = 0;
    for (int iter = 0; iter < cfg.max_hc_iters; ++iter) {
        const auto moves = enumerate_neighbourhood(state.graph, cfg.l_max);
        if (moves.empty()) break;
        const auto batch = evaluate_batch(
            ++snapshot, moves,
            [&](std::size_t idx, const Move& m) {
                return evaluate_candidate(engine, state.graph, state.cards, m, cfg, idx);
            },
            cfg.workers);
        remember_batch(engine, batch);

        const CandidateOutcome* winner = nullptr;
        for (const auto& outcome : batch.results) {
            if (!outcome.admissible || outcome.total_score <= state.total) continue;
            if (winner == nullptr || outcome.total_score > winner->total_score) {
                winner = &outcome;  // first max in move order wins ties
            }
        }
        if (winner == nullptr) break;

        const Move taken = moves[winner->move_index];
        apply_outcome(engine, state, *winner, taken, cfg);
        if (state.total > trace.best_score) {
            trace.best_score = state.total;
            trace.best_graph = state.graph;
        }
        trace.steps.push_back({taken, state.total, trace.best_score});
        trace.graphs.push_back(state.graph);
    }
    return {state.graph, trace};
}

SearchTrace tabu_search(ScoreEngine& engine, const LaggedGraph& g0, const SearchConfig& cfg) {
    SearchState state;
    state.graph = g0;
    std::tie(state.total, state.cards) = engine.score_graph(g0);

    SearchTrace trace;
    trace.initial_score = state.total;
    trace.best_graph = state.graph;
    trace.best_score = state.total;

    TabuList tabu;
    std::uint64_t snapshot = 0;
    for (int iter = 0; iter < cfg.max_tabu_iters; ++iter) {
        const auto moves = enumerate_neighbourhood(state.graph, cfg.l_max);
        if (moves.empty()) break;
        const auto batch = evaluate_batch(
            ++snapshot, moves,
            [&](std::size_t idx, const Move& m) {
                return evaluate_candidate(engine, state.graph, state.cards, m, cfg, idx);
            },
            cfg.workers);
        remember_batch(engine, batch);

        // Aspiration: a tabu move stays in the candidate set only when its
        // (tuned) score beats the best seen so far.
        const CandidateOutcome* winner = nullptr;
        for (const auto& outcome : batch.results) {
            if (!outcome.admissible) continue;
            if (tabu.contains(moves[outcome.move_index]) &&
                !(outcome.total_score > trace.best_score)) {
                continue;
            }
            if (winner == nullptr || outcome.total_score > winner->total_score) {
                winner = &outcome;
            }
        }
        if (winner == nullptr) break;

        const Move taken = moves[winner->move_index];
        apply_outcome(engine, state, *winner, taken, cfg);
        tabu.decay();
        tabu.push(taken, cfg.tabu_tenure);

        if (state.total > trace.best_score) {
            trace.best_score = state.total;
            trace.best_graph = state.graph;
        }
        trace.steps.push_back({taken, state.total, trace.best_score});
        trace.graphs.push_back(state.graph);
    }
    return trace;
}

LearnResult learn(const TimeSeriesDataset& ds, const SearchConfig& cfg,
                  const ScoreConfig& score_cfg) {
    ds.validate();
    if (!ds.complete()) throw std::invalid_argument("learn requires a complete dataset (impute first)");
    ScoreEngine engine(ds, score_cfg);

    auto [hc_graph, hc_trace] = hill_climb(engine, cfg);
    SearchTrace tabu_trace = tabu_search(engine, hc_graph, cfg);

    LearnResult result;
    result.trace.initial_score = hc_trace.initial_score;
    result.trace.steps = hc_trace.steps;
    result.trace.steps.insert(result.trace.steps.end(), tabu_trace.steps.begin(),
                              tabu_trace.steps.end());
    result.trace.graphs = hc_trace.graphs;
    result.trace.graphs.insert(result.trace.graphs.end(), tabu_trace.graphs.begin(),
                               tabu_trace.graphs.end());

    // The tabu phase starts from the HC result, so its best covers both.
    result.trace.best_graph = tabu_trace.best_graph;
    result.trace.best_score = tabu_trace.best_score;
    result.best_graph = tabu_trace.best_graph;
    result.best_score = tabu_trace.best_score;
    result.cards = engine.score_graph(result.best_graph).second;
    return result;
}

namespace {

TimeSeriesDataset truncate(const TimeSeriesDataset& ds, int t_keep) {
    TimeSeriesDataset out = ds;
    out.t_len = t_keep;
    for (int i = 0; i < ds.n_vars; ++i) {
        out.values[i].resize(static_cast<std::size_t>(t_keep));
        out.missing[i].resize(static_cast<std::size_t>(t_keep));
    }
    return out;
}

double tail_log_lik(const TimeSeriesDataset& full, const TimeSeriesDataset& train,
                    const LaggedGraph& g, const ScoreConfig& score_cfg, int t_train) {
    double total = 0.0;
    for (int j = 0; j < full.n_vars; ++j) {
        const auto parents = ScoreEngine::canonical_parents(g, j);
        const auto train_dm = build_design(train, j, parents);
        if (!train_dm) return kMinusInfScore;
        const auto fit = full.kinds[j] == VariableKind::Binary
                             ? fit_logistic_irls(*train_dm, score_cfg.irls)
                             : fit_ols(*train_dm);
        if (!fit) return kMinusInfScore;

        const auto full_dm = build_design(full, j, parents);
        if (!full_dm) return kMinusInfScore;
        const int first_tail_row = t_train - full_dm->start + 1;  // time > t_train
        for (int r = std::max(first_tail_row, 0); r < full_dm->n; ++r) {
            const double eta = full_dm->rows.row(r).dot(fit->coefficients);
            const double y = full_dm->response(r);
            if (full.kinds[j] == VariableKind::Binary) {
                double mu = 1.0 / (1.0 + std::exp(-eta));
                mu = std::clamp(mu, 1e-12, 1.0 - 1e-12);
                total += y * std::log(mu) + (1.0 - y) * std::log(1.0 - mu);
            } else {
                const double resid = y - eta;
                total += -0.5 * (std::log(2.0 * M_PI * fit->sigma2) + resid * resid / fit->sigma2);
            }
        }
    }
    return total;
}

}  // namespace

LambdaSelection select_lambda(const TimeSeriesDataset& ds, const std::vector<double>& grid,
                              const SearchConfig& cfg, const ScoreConfig& score_cfg) {
    if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
    const int t_train = static_cast<int>(std::floor(0.8 * ds.t_len));
    if (t_train < cfg.l_max + 2 || t_train >= ds.t_len) {
        throw std::invalid_argument("dataset too short for lambda selection split");
    }
    const TimeSeriesDataset train = truncate(ds, t_train);

    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());

    LambdaSelection selection;
    double best_ll = kMinusInfScore;
    bool first = true;
    for (double lambda : sorted) {
        ScoreConfig trial_cfg = score_cfg;
        trial_cfg.lambda = lambda;
        const LearnResult res = learn(train, cfg, trial_cfg);
        const double ll = tail_log_lik(ds, train, res.best_graph, trial_cfg, t_train);
        selection.tail_log_lik.emplace_back(lambda, ll);
        if (first || ll > best_ll) {  // ties keep the smaller lambda
            best_ll = ll;
            selection.lambda = lambda;
            first = false;
        }
    }
    return selection;
}

}  // namespace varlag
