#pragma once

#include "varlag/graph.hpp"

namespace varlag {

// Structural comparison over the universe of all N^2 ordered pairs
// (self-pairs included). Adjacency matching is at the directed-pair level,
// ignoring lags; lag error is reported separately over matched pairs.
//
// Reversal convention: a pair (i, j) counts as reversed when the truth has
// i->j, the learnt graph has j->i, and neither graph has the opposite edge.
// Reversed pairs count once in n_rev for SHD (excluded from n_add/n_del) but
// as one FP plus one FN for the confusion-matrix metrics.
struct StructuralReport {
    int tp = 0, tn = 0, fp = 0, fn = 0;
    int n_add = 0, n_del = 0, n_rev = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;  // 0 when precision + recall == 0
    int shd = 0;
    double bsf = 0.0;  // terms with a zero denominator contribute 0
    double lag_mae = 0.0;
    bool lag_mae_defined = false;  // false when no adjacency matched
    int n_matched_adjacencies = 0;
};

// Throws std::invalid_argument when the variable sets differ in size.
StructuralReport compare(const LaggedGraph& learnt, const LaggedGraph& truth);

}  // namespace varlag
