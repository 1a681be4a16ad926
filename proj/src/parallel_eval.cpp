#include "varlag/parallel_eval.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace varlag {

namespace {

void run_range(const std::vector<Move>& moves, const CandidateEvalFn& eval,
               std::vector<CandidateOutcome>& results, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        results[i] = eval(i, moves[i]);
        results[i].move_index = i;
    }
}

}  // namespace

int default_worker_count() {
    if (const char* env = std::getenv("VARLAG_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

CandidateBatch evaluate_batch(std::uint64_t snapshot_id, const std::vector<Move>& moves,
                              const CandidateEvalFn& eval, int workers) {
    CandidateBatch batch;
    batch.snapshot_id = snapshot_id;
    batch.moves = moves;
    batch.results.resize(moves.size());
    if (moves.empty()) return batch;

    const std::size_t m = moves.size();
    // Scores are independent of the worker count, so spawning more threads
    // than cores can only slow the batch down.
    const unsigned hw = std::thread::hardware_concurrency();
    std::size_t p = std::min<std::size_t>(std::max(workers, 1), m);
    if (hw > 0) p = std::min<std::size_t>(p, hw);
    if (p <= 1) {
        run_range(moves, eval, batch.results, 0, m);
        return batch;
    }

    // Static chunking: candidates have similar cost, so contiguous slices
    // balance well and every slot is written by exactly one worker.
    std::atomic<bool> failed{false};
    const std::size_t chunk = (m + p - 1) / p;
    std::vector<std::thread> pool;
    pool.reserve(p);
    for (std::size_t w = 0; w < p; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, m);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                run_range(moves, eval, batch.results, begin, end);
            } catch (...) {
                failed.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();

    if (failed.load()) {
        std::cerr << "[varlag] warning: parallel candidate evaluation failed; "
                     "re-evaluating batch serially\n";
        run_range(moves, eval, batch.results, 0, m);
    }
    return batch;
}

}  // namespace varlag
