#include "varlag/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace varlag {

StructuralReport compare(const LaggedGraph& learnt, const LaggedGraph& truth) {
    if (learnt.n_vars() != truth.n_vars()) {
        throw std::invalid_argument("graphs compare different variable sets");
    }
    const int n = truth.n_vars();

    StructuralReport r;
    double lag_err_sum = 0.0;
    int reversed_fp = 0;  // learnt edges that explain a reversal

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool in_truth = truth.has_edge(i, j);
            const bool in_learnt = learnt.has_edge(i, j);
            if (in_truth && in_learnt) {
                ++r.tp;
                lag_err_sum += std::abs(learnt.lag_of(i, j) - truth.lag_of(i, j));
            } else if (in_truth) {
                ++r.fn;
                if (i != j && learnt.has_edge(j, i) && !truth.has_edge(j, i)) {
                    ++r.n_rev;
                }
            } else if (in_learnt) {
                ++r.fp;
            } else {
                ++r.tn;
            }
        }
    }
    // A reversed pair consumes one missing truth edge and one spurious
    // learnt edge; SHD then needs one reversal instead of an add plus a delete.
    reversed_fp = r.n_rev;
    r.n_add = r.fn - r.n_rev;
    r.n_del = r.fp - reversed_fp;
    r.shd = r.n_add + r.n_del + r.n_rev;

    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;

    const int true_edges = r.tp + r.fn;          // |E|
    const int true_non_edges = r.tn + r.fp;      // |M| = N^2 - |E|
    double bsf = 0.0;
    if (true_edges > 0) bsf += static_cast<double>(r.tp - r.fn) / true_edges;
    if (true_non_edges > 0) bsf += static_cast<double>(r.tn - r.fp) / true_non_edges;
    r.bsf = 0.5 * bsf;

    r.n_matched_adjacencies = r.tp;
    r.lag_mae_defined = r.tp > 0;
    r.lag_mae = r.tp > 0 ? lag_err_sum / r.tp : 0.0;
    return r;
}

}  // namespace varlag
