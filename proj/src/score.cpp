#include "varlag/score.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace varlag {

namespace {

std::string memo_key(int child, const std::vector<std::pair<int, int>>& parents) {
    std::string key = std::to_string(child);
    for (const auto& [p, l] : parents) {
        key += ':';
        key += std::to_string(p);
        key += ',';
        key += std::to_string(l);
    }
    return key;
}

}  // namespace

ScoreEngine::ScoreEngine(const TimeSeriesDataset& ds, const ScoreConfig& cfg)
    : ds_(ds), cfg_(cfg) {
    if (cfg.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (cfg.l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    if (!ds.complete()) throw std::invalid_argument("score engine needs a complete dataset");
}

std::vector<std::pair<int, int>> ScoreEngine::canonical_parents(const LaggedGraph& g, int child) {
    std::vector<std::pair<int, int>> parents;
    parents.reserve(g.parents_of(child).size());
    for (const auto& e : g.parents_of(child)) parents.emplace_back(e.parent, e.lag);
    std::sort(parents.begin(), parents.end());
    return parents;
}

NodeScoreCard ScoreEngine::compute_node(int child,
                                        const std::vector<std::pair<int, int>>& parents) const {
    NodeScoreCard card;
    card.child = child;
    double lag_steps = 0.0;
    for (const auto& [p, l] : parents) {
        (void)p;
        lag_steps += std::max(0, l - 1);
    }
    card.lag_penalty = cfg_.lambda * lag_steps;

    const auto dm = build_design(ds_, child, parents);
    if (!dm) return card;  // inadmissible: too few usable rows

    const auto fit = ds_.kinds[child] == VariableKind::Binary
                         ? fit_logistic_irls(*dm, cfg_.irls)
                         : fit_ols(*dm);
    if (!fit) return card;

    card.log_lik = fit->log_likelihood;
    card.p = fit->param_count;
    card.n_eff = dm->n;
    card.local_score =
        2.0 * card.log_lik - static_cast<double>(card.p) * std::log(static_cast<double>(card.n_eff)) -
        card.lag_penalty;
    card.admissible = std::isfinite(card.local_score);
    if (!card.admissible) card.local_score = kMinusInfScore;
    return card;
}

NodeScoreCard ScoreEngine::score_node(int child,
                                      const std::vector<std::pair<int, int>>& parents) const {
    const auto it = memo_.find(memo_key(child, parents));
    if (it != memo_.end()) return it->second;
    return compute_node(child, parents);
}

NodeScoreCard ScoreEngine::score_node(const LaggedGraph& g, int child) const {
    return score_node(child, canonical_parents(g, child));
}

void ScoreEngine::remember(const NodeScoreCard& card,
                           const std::vector<std::pair<int, int>>& parents) {
    memo_.emplace(memo_key(card.child, parents), card);
}

double ScoreEngine::total_of(const std::vector<NodeScoreCard>& cards) {
    double total = 0.0;
    for (const auto& card : cards) {
        if (!card.admissible) return kMinusInfScore;
        total += card.local_score;
    }
    return total;
}

std::pair<double, std::vector<NodeScoreCard>> ScoreEngine::score_graph(
    const LaggedGraph& g) const {
    std::vector<NodeScoreCard> cards;
    cards.reserve(static_cast<std::size_t>(g.n_vars()));
    for (int j = 0; j < g.n_vars(); ++j) cards.push_back(score_node(g, j));
    return {total_of(cards), std::move(cards)};
}

std::pair<double, std::vector<NodeScoreCard>> ScoreEngine::score_delta(
    const std::vector<NodeScoreCard>& cards, const LaggedGraph& moved, const Move& m) const {
    assert(static_cast<int>(cards.size()) == moved.n_vars());
    std::vector<NodeScoreCard> updated = cards;
    updated[static_cast<std::size_t>(m.edge.child)] = score_node(moved, m.edge.child);
    if (m.kind == MoveKind::Reverse) {
        updated[static_cast<std::size_t>(m.edge.parent)] = score_node(moved, m.edge.parent);
    }
    const double before = total_of(cards);
    const double after = total_of(updated);
    double delta;
    if (before == after) {
        delta = 0.0;  // covers the -inf-to--inf case without producing NaN
    } else {
        delta = after - before;
    }
    return {delta, std::move(updated)};
}

}  // namespace varlag
