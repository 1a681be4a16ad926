#pragma once

#include "varlag/dataset.hpp"
#include "varlag/graph.hpp"
#include "varlag/local_models.hpp"

#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace varlag {

struct ScoreConfig {
    double lambda = 1.0;  // lag-penalty weight
    int l_max = 1;
    IrlsSettings irls;
};

// Per-child local score and its components. An inadmissible candidate
// (n < p, singular or non-finite fit) is marked by admissible = false and a
// -infinity local score; searches skip such candidates instead of throwing.
struct NodeScoreCard {
    int child = -1;
    double local_score = -std::numeric_limits<double>::infinity();
    double log_lik = 0.0;
    int p = 0;
    int n_eff = 0;
    double lag_penalty = 0.0;  // lambda * sum(max(0, lag - 1)) over parents
    bool admissible = false;
};

constexpr double kMinusInfScore = -std::numeric_limits<double>::infinity();

// Decomposable score: total = sum over children of
//   2*log_lik - p*log(n_eff) - lambda * sum(max(0, lag-1)).
// The memo cache is keyed by (child, canonical parent list). Lookups are safe
// from many threads; insertion happens only on the search thread between
// candidate batches (single-writer, many-reader).
class ScoreEngine {
  public:
    ScoreEngine(const TimeSeriesDataset& ds, const ScoreConfig& cfg);

    const ScoreConfig& config() const { return cfg_; }
    const TimeSeriesDataset& dataset() const { return ds_; }

    // Pure compute with a read-only cache probe; never mutates the memo.
    NodeScoreCard score_node(int child, const std::vector<std::pair<int, int>>& parents) const;
    NodeScoreCard score_node(const LaggedGraph& g, int child) const;

    std::pair<double, std::vector<NodeScoreCard>> score_graph(const LaggedGraph& g) const;

    // Recomputes only the children a move touches (two for Reverse, one
    // otherwise) against the cached cards; `moved` must be the post-move
    // graph and `cards` consistent with the pre-move graph.
    std::pair<double, std::vector<NodeScoreCard>> score_delta(
        const std::vector<NodeScoreCard>& cards, const LaggedGraph& moved, const Move& m) const;

    // Single-writer memo update; call only from the search thread.
    void remember(const NodeScoreCard& card, const std::vector<std::pair<int, int>>& parents);

    static double total_of(const std::vector<NodeScoreCard>& cards);
    static std::vector<std::pair<int, int>> canonical_parents(const LaggedGraph& g, int child);

  private:
    NodeScoreCard compute_node(int child, const std::vector<std::pair<int, int>>& parents) const;

    const TimeSeriesDataset& ds_;
    ScoreConfig cfg_;
    std::unordered_map<std::string, NodeScoreCard> memo_;
};

}  // namespace varlag
