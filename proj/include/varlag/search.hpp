#pragma once

#include "varlag/dataset.hpp"
#include "varlag/graph.hpp"
#include "varlag/parallel_eval.hpp"
#include "varlag/score.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace varlag {

struct SearchConfig {
    int tabu_tenure = 10;
    int max_hc_iters = 200;
    int max_tabu_iters = 100;
    int l_max = 1;
    std::uint64_t seed = 0;
    bool tune_after_changelag = true;
    bool retune_both_on_reverse = true;
    bool tune_candidates = true;  // false: tune only the selected move (faster, off-book)
    int workers = 1;
};

// Recently taken moves are barred (by inverse-move signature) for a fixed
// number of iterations. Signatures ignore lags: re-adding a just-deleted
// edge at any lag is tabu, which stops add/delete oscillation.
class TabuList {
  public:
    using Signature = std::tuple<int, int, int>;  // (kind, parent, child)

    static Signature signature(const Move& m);
    static Move inverse(const Move& m);

    void push(const Move& taken, int tenure);  // records inverse(taken)
    void decay();                              // decrement tenures, drop expired
    bool contains(const Move& m) const;
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<Signature, int> entries_;
};

struct TraceStep {
    Move move;
    double score_after = 0.0;
    double best_so_far = 0.0;
};

struct SearchTrace {
    double initial_score = 0.0;
    std::vector<TraceStep> steps;
    std::vector<LaggedGraph> graphs;  // post-move snapshot per step
    LaggedGraph best_graph;
    double best_score = kMinusInfScore;
};

// Single-step lag optimisation for one child: repeatedly tries +/-1 on each
// incoming edge, keeping strict improvements of the child's local score,
// until a full pass changes nothing. Only the child's card is refit per trial.
LaggedGraph greedy_lag_tune(const ScoreEngine& engine, const LaggedGraph& g, int child,
                            int l_max);

// Applies the move and runs the induced lag tuning (add/reverse/change-lag),
// returning the tuned graph, refreshed cards for the touched children, and
// the candidate's total score.
CandidateOutcome evaluate_candidate(const ScoreEngine& engine, const LaggedGraph& g,
                                    const std::vector<NodeScoreCard>& cards, const Move& m,
                                    const SearchConfig& cfg, std::size_t move_index);

// Greedy best-improving search from the empty graph; stops when no tuned
// candidate strictly improves the score, so the result is a local optimum of
// the full move neighbourhood.
std::pair<LaggedGraph, SearchTrace> hill_climb(ScoreEngine& engine, const SearchConfig& cfg);

// Tabu phase per the main loop: candidates are admissible when their move is
// not tabu or beats the best score so far (aspiration); the best candidate is
// taken even when non-improving, and the best graph seen is returned.
SearchTrace tabu_search(ScoreEngine& engine, const LaggedGraph& g0, const SearchConfig& cfg);

struct LearnResult {
    LaggedGraph best_graph;
    double best_score = kMinusInfScore;
    SearchTrace trace;  // hill-climb steps followed by tabu steps
    std::vector<NodeScoreCard> cards;
};

LearnResult learn(const TimeSeriesDataset& ds, const SearchConfig& cfg,
                  const ScoreConfig& score_cfg);

// Small-grid lambda selection: for each candidate weight, learn on the first
// 80% of the series and score the held-out tail log-likelihood under the
// trained local models; the best tail fit wins (ties: smaller lambda).
struct LambdaSelection {
    double lambda = 1.0;
    std::vector<std::pair<double, double>> tail_log_lik;  // (lambda, tail LL)
};

LambdaSelection select_lambda(const TimeSeriesDataset& ds, const std::vector<double>& grid,
                              const SearchConfig& cfg, const ScoreConfig& score_cfg);

}  // namespace varlag
