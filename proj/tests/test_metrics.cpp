#include "varlag/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace varlag;

TEST_CASE("identical graphs score perfectly") {
    std::mt19937_64 rng(3);
    const auto g = oracles::random_graph(4, 0.4, 3, rng);
    const auto r = compare(g, g);
    CHECK(r.f1 == doctest::Approx(1.0));
    CHECK(r.shd == 0);
    CHECK(r.bsf == doctest::Approx(1.0));
    CHECK(r.lag_mae == 0.0);
    CHECK(r.n_matched_adjacencies == g.n_edges());
}

TEST_CASE("empty learnt graph against a nonempty truth anchors BSF at zero") {
    LaggedGraph truth(3);
    truth.add_edge(0, 1, 1);
    truth.add_edge(2, 2, 2);
    const auto r = compare(LaggedGraph(3), truth);
    CHECK(r.bsf == doctest::Approx(0.0));
    CHECK(r.f1 == 0.0);
    CHECK(r.recall == 0.0);
    CHECK_FALSE(r.lag_mae_defined);
    CHECK(r.lag_mae == 0.0);
}

TEST_CASE("fully connected learnt graph also anchors BSF at zero") {
    LaggedGraph truth(3);
    truth.add_edge(0, 1, 1);
    LaggedGraph full(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) full.add_edge(i, j, 1);
    }
    CHECK(compare(full, truth).bsf == doctest::Approx(0.0));
}

TEST_CASE("F1 composes precision 0.52 and recall 0.58 as the harmonic mean") {
    // Integer-exact construction: TP = 377, FP = 348, FN = 273 gives
    // P = 377/725 = 0.52 and R = 377/650 = 0.58 exactly (N = 32).
    const int n = 32;
    LaggedGraph truth(n), learnt(n);
    int tp = 377, fp = 348, fn = 273;
    for (int i = 0; i < n && (tp + fp + fn) > 0; ++i) {
        for (int j = 0; j < n; ++j) {
            if (tp > 0) {
                truth.add_edge(i, j, 1);
                learnt.add_edge(i, j, 1);
                --tp;
            } else if (fn > 0) {
                truth.add_edge(i, j, 1);
                --fn;
            } else if (fp > 0) {
                learnt.add_edge(i, j, 1);
                --fp;
            }
        }
    }
    const auto r = compare(learnt, truth);
    CHECK(r.precision == doctest::Approx(0.52).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(0.58).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(2.0 * (0.52 * 0.58) / (0.52 + 0.58)).epsilon(1e-12));
}

TEST_CASE("compare equals the exhaustive pair-enumeration oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);  // up to 5
        const auto truth = oracles::random_graph(n, 0.35, 4, rng);
        const auto learnt = oracles::random_graph(n, 0.35, 4, rng);
        const auto r = compare(learnt, truth);
        const auto oracle = oracles::enumerate_pairs(learnt, truth);
        CHECK(r.tp == oracle.tp);
        CHECK(r.tn == oracle.tn);
        CHECK(r.fp == oracle.fp);
        CHECK(r.fn == oracle.fn);
        CHECK(r.n_rev == oracle.rev);
        if (oracle.tp > 0) CHECK(r.lag_mae == doctest::Approx(oracle.lag_err / oracle.tp));

        // Bookkeeping identities over the full N^2 universe.
        CHECK(r.tp + r.tn + r.fp + r.fn == n * n);
        CHECK(r.tp + r.fn == truth.n_edges());
        CHECK(r.tn + r.fp == n * n - truth.n_edges());
        CHECK(r.n_add + r.n_rev == r.fn);
        CHECK(r.n_del + r.n_rev == r.fp);
        CHECK(r.shd == r.n_add + r.n_del + r.n_rev);
        CHECK(r.bsf >= -1.0);
        CHECK(r.bsf <= 1.0);
        CHECK(r.f1 >= 0.0);
        CHECK(r.f1 <= 1.0);
    }
}

TEST_CASE("a flipped orientation counts once in SHD but twice in the confusion matrix") {
    LaggedGraph truth(2), learnt(2);
    truth.add_edge(0, 1, 2);
    learnt.add_edge(1, 0, 1);
    const auto r = compare(learnt, truth);
    CHECK(r.n_rev == 1);
    CHECK(r.n_add == 0);
    CHECK(r.n_del == 0);
    CHECK(r.shd == 1);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
    CHECK(r.tp == 0);
}

TEST_CASE("F1 is invariant to a consistent relabeling") {
    std::mt19937_64 rng(23);
    const int n = 5;
    const auto truth = oracles::random_graph(n, 0.3, 3, rng);
    const auto learnt = oracles::random_graph(n, 0.3, 3, rng);

    std::vector<int> perm{3, 1, 4, 0, 2};
    const auto relabel = [&](const LaggedGraph& g) {
        LaggedGraph out(n);
        for (const auto& e : g.edges()) {
            out.add_edge(perm[static_cast<std::size_t>(e.parent)],
                         perm[static_cast<std::size_t>(e.child)], e.lag);
        }
        return out;
    };
    const auto base = compare(learnt, truth);
    const auto permuted = compare(relabel(learnt), relabel(truth));
    CHECK(base.f1 == doctest::Approx(permuted.f1));
    CHECK(base.shd == permuted.shd);
    CHECK(base.bsf == doctest::Approx(permuted.bsf));
}

TEST_CASE("variable-set mismatch is rejected") {
    CHECK_THROWS_AS((void)compare(LaggedGraph(3), LaggedGraph(4)), std::invalid_argument);
}

TEST_CASE("lag MAE is averaged over matched directed pairs only") {
    LaggedGraph truth(3), learnt(3);
    truth.add_edge(0, 1, 3);
    truth.add_edge(1, 2, 1);
    truth.add_edge(2, 0, 2);
    learnt.add_edge(0, 1, 1);  // matched, off by 2
    learnt.add_edge(1, 2, 1);  // matched, exact
    learnt.add_edge(0, 2, 4);  // spurious: ignored by the MAE
    const auto r = compare(learnt, truth);
    CHECK(r.n_matched_adjacencies == 2);
    CHECK(r.lag_mae_defined);
    CHECK(r.lag_mae == doctest::Approx(1.0));
}
