#pragma once

#include "varlag/dataset.hpp"
#include "varlag/graph.hpp"
#include "varlag/metrics.hpp"
#include "varlag/score.hpp"
#include "varlag/search.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace varlag {

enum class LagMode { Short, Long };
enum class MissingMode { None, MCAR, MAR };

const char* to_string(LagMode mode);
const char* to_string(MissingMode mode);

struct GenConfig {
    int n_vars = 8;
    int t_len = 2000;
    double p_edge = 0.15;
    LagMode lag_mode = LagMode::Short;
    int l_max = 4;
    double noise_sd = 0.8;
    double phi = 0.0;          // AR(1) coefficient applied to continuous nodes
    double frac_binary = 0.2;  // first ceil(frac*N) variables are binary
    int n_confounders = 0;
    MissingMode missing_mode = MissingMode::None;
    double missing_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct ConfounderSpec {
    double phi = 0.5;
    // Each hidden AR(1) series feeds two distinct observed targets.
    struct Wire {
        int target = -1;
        int lag = 1;
        double beta = 1.0;
    };
    std::vector<Wire> wires;
};

struct GroundTruth {
    LaggedGraph graph;  // observed variables only
    std::vector<VariableKind> kinds;
    std::vector<double> intercepts;
    // Coefficient per edge, aligned with graph.edges() via (parent, child).
    std::vector<std::pair<LaggedEdge, double>> coefficients;
    std::vector<ConfounderSpec> confounders;

    double coefficient(int parent, int child) const;  // throws if edge absent
};

// Random truth per the generator settings: each ordered pair (self-pairs
// included) gets an edge with probability p_edge, lags Short={1,2} or
// Long={l_max-1, l_max}, coefficients uniform on +/-[0.5, 1.5]. A positive
// phi adds a lag-1 self-edge with coefficient phi to every continuous node,
// so the autoregressive structure is part of the ground truth.
GroundTruth generate_truth(const GenConfig& cfg);

// Forward simulation with a 200-step burn-in: linear-Gaussian continuous
// nodes, Bernoulli(logit^-1) binary nodes (predictor clamped to +/-30),
// confounder series simulated but excluded from the output. If a continuous
// series exceeds 1e6 in magnitude, coefficients are halved and the
// simulation restarts.
TimeSeriesDataset simulate(const GroundTruth& truth, const GenConfig& cfg);

// MCAR: iid cell masking at missing_rate. MAR: cell (j, t) masked with
// probability logit^-1(a + v_{donor, t-1}) for a fixed random donor per
// target; a is bisected so the mean masking probability matches the rate.
TimeSeriesDataset apply_missingness(const TimeSeriesDataset& ds, const GenConfig& cfg);

struct SweepSpec {
    std::string name;
    std::string factor;              // GenConfig field being varied
    std::vector<std::string> grid;   // values for the varied factor
    int trials = 5;
    std::uint64_t seed = 0;
    GenConfig baseline;
    ScoreConfig score;
    SearchConfig search;
};

struct TrialResult {
    int setting_index = -1;
    std::string factor_value;
    int trial = -1;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    StructuralReport report;
    int n_true_edges = 0;
    int n_learnt_edges = 0;
    double seconds = 0.0;
};

// One-factor-at-a-time sweep: grid x trials runs with per-trial RNG streams
// derived from (spec seed, setting, trial). Failed trials are recorded with
// diagnostics and excluded from setting means. Trials run concurrently when
// trial_workers > 1; results are deterministic either way.
std::vector<TrialResult> run_sweep(const SweepSpec& spec, int trial_workers = 1);

struct SettingSummary {
    int setting_index = -1;
    std::string factor_value;
    int n_ok = 0;
    int n_failed = 0;
    double f1_mean = 0.0, f1_sd = 0.0;
    double shd_mean = 0.0, shd_sd = 0.0;
    double bsf_mean = 0.0, bsf_sd = 0.0;
    double lag_mae_mean = 0.0, lag_mae_sd = 0.0;
    double precision_mean = 0.0, recall_mean = 0.0;
};

std::vector<SettingSummary> summarize(const SweepSpec& spec, const std::vector<TrialResult>& trials);

std::uint64_t trial_seed(std::uint64_t spec_seed, int setting_index, int trial);

}  // namespace varlag
