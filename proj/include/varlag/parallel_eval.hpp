#pragma once

#include "varlag/graph.hpp"
#include "varlag/score.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace varlag {

// Outcome of scoring one candidate move against a frozen snapshot: the
// applied-and-tuned graph, the recomputed cards for the touched children, and
// the resulting total. Inadmissible candidates carry a -infinity total.
struct CandidateOutcome {
    std::size_t move_index = 0;
    bool admissible = false;
    double total_score = kMinusInfScore;
    LaggedGraph graph;
    std::vector<NodeScoreCard> changed_cards;
};

struct CandidateBatch {
    std::uint64_t snapshot_id = 0;
    std::vector<Move> moves;
    std::vector<CandidateOutcome> results;  // one per move, in move order
};

using CandidateEvalFn = std::function<CandidateOutcome(std::size_t, const Move&)>;

// Evaluates candidates across `workers` threads with static chunking. Each
// candidate is computed by exactly one worker running the same code as the
// serial path, so the outcome (and every score bit) is independent of the
// worker count; results are returned normalised to move order. If any worker
// throws, the whole batch is re-evaluated serially on the calling thread and
// a warning is written to stderr.
CandidateBatch evaluate_batch(std::uint64_t snapshot_id, const std::vector<Move>& moves,
                              const CandidateEvalFn& eval, int workers);

int default_worker_count();  // VARLAG_WORKERS env var, else logical cores

}  // namespace varlag
