#include "varlag/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

namespace varlag {

const char* to_string(LagMode mode) { return mode == LagMode::Short ? "short" : "long"; }

const char* to_string(MissingMode mode) {
    switch (mode) {
        case MissingMode::None: return "none";
        case MissingMode::MCAR: return "mcar";
        case MissingMode::MAR: return "mar";
    }
    return "?";
}

void GenConfig::validate() const {
    if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
    if (t_len < 2) throw std::invalid_argument("t_len must be >= 2");
    if (p_edge < 0.0 || p_edge > 1.0) throw std::invalid_argument("p_edge must be in [0,1]");
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    if (noise_sd <= 0.0) throw std::invalid_argument("noise_sd must be > 0");
    if (phi < 0.0 || phi >= 1.0) throw std::invalid_argument("phi must be in [0,1)");
    if (frac_binary < 0.0 || frac_binary > 1.0) {
        throw std::invalid_argument("frac_binary must be in [0,1]");
    }
    if (n_confounders < 0) throw std::invalid_argument("n_confounders must be >= 0");
    if (missing_rate < 0.0 || missing_rate >= 1.0) {
        throw std::invalid_argument("missing_rate must be in [0,1)");
    }
    if (missing_mode != MissingMode::None && n_vars < 2 && missing_mode == MissingMode::MAR) {
        throw std::invalid_argument("MAR missingness needs a donor variable");
    }
}

double GroundTruth::coefficient(int parent, int child) const {
    for (const auto& [edge, beta] : coefficients) {
        if (edge.parent == parent && edge.child == child) return beta;
    }
    throw std::logic_error("no coefficient for requested edge");
}

namespace {

constexpr int kBurnIn = 200;
constexpr double kPredictorClamp = 30.0;
constexpr double kStabilityBound = 1e6;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

int draw_lag(std::mt19937_64& rng, LagMode mode, int l_max) {
    int lo, hi;
    if (mode == LagMode::Short) {
        lo = 1;
        hi = std::min(2, l_max);
    } else {
        lo = std::max(1, l_max - 1);
        hi = l_max;
    }
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::uint64_t trial_seed(std::uint64_t spec_seed, int setting_index, int trial) {
    std::uint64_t h = splitmix64(spec_seed);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(setting_index) + 1));
    h = splitmix64(h ^ ((static_cast<std::uint64_t>(trial) + 1) << 20));
    return h;
}

GroundTruth generate_truth(const GenConfig& cfg) {
    cfg.validate();
    auto rng = make_rng(cfg.seed, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(0.5, 1.5);

    GroundTruth truth;
    truth.graph = LaggedGraph(cfg.n_vars);
    const int n_binary = static_cast<int>(std::ceil(cfg.frac_binary * cfg.n_vars));
    truth.kinds.assign(static_cast<std::size_t>(cfg.n_vars), VariableKind::Continuous);
    for (int i = 0; i < std::min(n_binary, cfg.n_vars); ++i) {
        truth.kinds[static_cast<std::size_t>(i)] = VariableKind::Binary;
    }

    for (int i = 0; i < cfg.n_vars; ++i) {
        for (int j = 0; j < cfg.n_vars; ++j) {
            if (unit(rng) >= cfg.p_edge) continue;
            const int lag = draw_lag(rng, cfg.lag_mode, cfg.l_max);
            const double mag = magnitude(rng);
            const double beta = unit(rng) < 0.5 ? mag : -mag;
            truth.graph.add_edge(i, j, lag);
            truth.coefficients.push_back({{i, j, lag}, beta});
        }
    }

    truth.intercepts.resize(static_cast<std::size_t>(cfg.n_vars));
    std::uniform_real_distribution<double> intercept(-0.5, 0.5);
    for (int j = 0; j < cfg.n_vars; ++j) truth.intercepts[static_cast<std::size_t>(j)] = intercept(rng);

    // Parent autocorrelation is part of the data-generating process, so a
    // positive phi materialises as a lag-1 self-edge in the ground truth for
    // every continuous node (replacing any randomly drawn self-edge).
    if (cfg.phi > 0.0) {
        for (int j = 0; j < cfg.n_vars; ++j) {
            if (truth.kinds[static_cast<std::size_t>(j)] != VariableKind::Continuous) continue;
            if (truth.graph.has_edge(j, j)) {
                truth.graph.set_lag(j, j, 1);
                for (auto& [edge, beta] : truth.coefficients) {
                    if (edge.parent == j && edge.child == j) {
                        edge.lag = 1;
                        beta = cfg.phi;
                    }
                }
            } else {
                truth.graph.add_edge(j, j, 1);
                truth.coefficients.push_back({{j, j, 1}, cfg.phi});
            }
        }
    }

    for (int c = 0; c < cfg.n_confounders; ++c) {
        ConfounderSpec spec;
        spec.phi = 0.5;
        std::uniform_int_distribution<int> pick(0, cfg.n_vars - 1);
        const int first = pick(rng);
        int second = first;
        while (second == first && cfg.n_vars > 1) second = pick(rng);
        for (int target : {first, second}) {
            ConfounderSpec::Wire wire;
            wire.target = target;
            wire.lag = draw_lag(rng, cfg.lag_mode, cfg.l_max);
            wire.beta = 1.0;
            spec.wires.push_back(wire);
        }
        truth.confounders.push_back(spec);
    }
    return truth;
}

TimeSeriesDataset simulate(const GroundTruth& truth, const GenConfig& cfg) {
    cfg.validate();
    const int n = truth.graph.n_vars();
    int pad = cfg.l_max;  // history window must cover every lag in the truth
    for (const auto& e : truth.graph.edges()) pad = std::max(pad, e.lag);
    for (const auto& c : truth.confounders) {
        for (const auto& w : c.wires) pad = std::max(pad, w.lag);
    }
    const int total = pad + kBurnIn + cfg.t_len;

    std::map<std::pair<int, int>, double> coef;
    for (const auto& [edge, beta] : truth.coefficients) coef[{edge.parent, edge.child}] = beta;

    double scale = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        auto rng = make_rng(cfg.seed, 2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<std::vector<double>> conf(truth.confounders.size(),
                                              std::vector<double>(static_cast<std::size_t>(total)));
        std::vector<std::vector<double>> series(static_cast<std::size_t>(n),
                                                std::vector<double>(static_cast<std::size_t>(total)));
        for (auto& h : conf) {
            for (int t = 0; t < pad; ++t) h[static_cast<std::size_t>(t)] = gauss(rng);
        }
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < pad; ++t) {
                series[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
                    truth.kinds[static_cast<std::size_t>(i)] == VariableKind::Binary
                        ? (unit(rng) < 0.5 ? 1.0 : 0.0)
                        : gauss(rng);
            }
        }

        bool stable = true;
        for (int t = pad; t < total && stable; ++t) {
            for (std::size_t c = 0; c < conf.size(); ++c) {
                conf[c][static_cast<std::size_t>(t)] =
                    truth.confounders[c].phi * conf[c][static_cast<std::size_t>(t - 1)] + gauss(rng);
            }
            for (int j = 0; j < n; ++j) {
                double eta = truth.intercepts[static_cast<std::size_t>(j)];
                for (const auto& e : truth.graph.parents_of(j)) {
                    eta += scale * coef.at({e.parent, j}) *
                           series[static_cast<std::size_t>(e.parent)][static_cast<std::size_t>(t - e.lag)];
                }
                for (std::size_t c = 0; c < truth.confounders.size(); ++c) {
                    for (const auto& wire : truth.confounders[c].wires) {
                        if (wire.target != j) continue;
                        eta += scale * wire.beta * conf[c][static_cast<std::size_t>(t - wire.lag)];
                    }
                }
                double value;
                if (truth.kinds[static_cast<std::size_t>(j)] == VariableKind::Binary) {
                    const double p = sigmoid(std::clamp(eta, -kPredictorClamp, kPredictorClamp));
                    value = unit(rng) < p ? 1.0 : 0.0;
                } else {
                    value = eta + cfg.noise_sd * gauss(rng);
                    if (std::abs(value) > kStabilityBound) stable = false;
                }
                series[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = value;
            }
        }
        if (!stable) {
            scale *= 0.5;
            std::cerr << "[varlag] simulation diverged; rescaling coefficients to " << scale
                      << " and restarting\n";
            continue;
        }

        TimeSeriesDataset ds;
        ds.n_vars = n;
        ds.t_len = cfg.t_len;
        ds.kinds = truth.kinds;
        for (int i = 0; i < n; ++i) {
            ds.names.push_back("x" + std::to_string(i + 1));
            ds.values.emplace_back(series[static_cast<std::size_t>(i)].end() - cfg.t_len,
                                   series[static_cast<std::size_t>(i)].end());
            ds.missing.emplace_back(static_cast<std::size_t>(cfg.t_len), false);
        }
        ds.validate();
        return ds;
    }
    throw std::runtime_error("simulation failed to stabilise after 40 rescales");
}

TimeSeriesDataset apply_missingness(const TimeSeriesDataset& ds, const GenConfig& cfg) {
    if (cfg.missing_mode == MissingMode::None || cfg.missing_rate <= 0.0) return ds;
    if (!ds.complete()) throw std::invalid_argument("apply_missingness expects a complete dataset");

    TimeSeriesDataset out = ds;
    auto rng = make_rng(cfg.seed, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    if (cfg.missing_mode == MissingMode::MCAR) {
        for (int j = 0; j < ds.n_vars; ++j) {
            for (int t = 0; t < ds.t_len; ++t) {
                if (unit(rng) < cfg.missing_rate) out.missing[j][t] = true;
            }
        }
        return out;
    }

    // MAR: each target gets a fixed donor; the intercept of the masking
    // logit is bisected so the mean masking probability hits the rate.
    if (ds.n_vars < 2) throw std::invalid_argument("MAR missingness needs a donor variable");
    std::vector<int> donor(static_cast<std::size_t>(ds.n_vars));
    for (int j = 0; j < ds.n_vars; ++j) {
        std::uniform_int_distribution<int> pick(0, ds.n_vars - 2);
        const int raw = pick(rng);
        donor[static_cast<std::size_t>(j)] = raw >= j ? raw + 1 : raw;
    }
    const auto donor_value = [&](int j, int t) {
        return t >= 1 ? ds.values[static_cast<std::size_t>(donor[static_cast<std::size_t>(j)])]
                                 [static_cast<std::size_t>(t - 1)]
                      : 0.0;
    };
    const auto mean_rate = [&](double a) {
        double sum = 0.0;
        for (int j = 0; j < ds.n_vars; ++j) {
            for (int t = 0; t < ds.t_len; ++t) sum += sigmoid(a + donor_value(j, t));
        }
        return sum / (static_cast<double>(ds.n_vars) * ds.t_len);
    };
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_rate(mid) < cfg.missing_rate) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double a = 0.5 * (lo + hi);

    for (int j = 0; j < ds.n_vars; ++j) {
        for (int t = 0; t < ds.t_len; ++t) {
            if (unit(rng) < sigmoid(a + donor_value(j, t))) out.missing[j][t] = true;
        }
    }
    return out;
}

namespace {

GenConfig apply_factor(const GenConfig& base, const std::string& factor,
                       const std::string& value) {
    GenConfig cfg = base;
    if (factor == "n_vars") {
        cfg.n_vars = std::stoi(value);
    } else if (factor == "t_len") {
        cfg.t_len = std::stoi(value);
    } else if (factor == "p_edge") {
        cfg.p_edge = std::stod(value);
    } else if (factor == "lag_mode") {
        if (value == "short") {
            cfg.lag_mode = LagMode::Short;
        } else if (value == "long") {
            cfg.lag_mode = LagMode::Long;
        } else {
            throw std::invalid_argument("lag_mode value must be short|long: " + value);
        }
    } else if (factor == "noise_sd") {
        cfg.noise_sd = std::stod(value);
    } else if (factor == "phi") {
        cfg.phi = std::stod(value);
    } else if (factor == "frac_binary") {
        cfg.frac_binary = std::stod(value);
    } else if (factor == "n_confounders") {
        cfg.n_confounders = std::stoi(value);
    } else if (factor == "mcar_rate") {
        cfg.missing_mode = MissingMode::MCAR;
        cfg.missing_rate = std::stod(value);
        if (cfg.missing_rate == 0.0) cfg.missing_mode = MissingMode::None;
    } else if (factor == "mar_rate") {
        cfg.missing_mode = MissingMode::MAR;
        cfg.missing_rate = std::stod(value);
        if (cfg.missing_rate == 0.0) cfg.missing_mode = MissingMode::None;
    } else {
        throw std::invalid_argument("unknown sweep factor: " + factor);
    }
    return cfg;
}

TrialResult run_trial(const SweepSpec& spec, int setting_index, int trial) {
    TrialResult result;
    result.setting_index = setting_index;
    result.factor_value = spec.grid[static_cast<std::size_t>(setting_index)];
    result.trial = trial;
    result.seed = trial_seed(spec.seed, setting_index, trial);
    const auto started = std::chrono::steady_clock::now();
    try {
        GenConfig gen = apply_factor(spec.baseline, spec.factor, result.factor_value);
        gen.seed = result.seed;
        const GroundTruth truth = generate_truth(gen);
        TimeSeriesDataset ds = simulate(truth, gen);
        if (gen.missing_mode != MissingMode::None) {
            ds = impute(apply_missingness(ds, gen));
        }
        SearchConfig search_cfg = spec.search;
        search_cfg.seed = result.seed;
        const LearnResult learnt = learn(ds, search_cfg, spec.score);
        result.report = compare(learnt.best_graph, truth.graph);
        result.n_true_edges = truth.graph.n_edges();
        result.n_learnt_edges = learnt.best_graph.n_edges();
        result.ok = true;
    } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace

std::vector<TrialResult> run_sweep(const SweepSpec& spec, int trial_workers) {
    if (spec.grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (spec.trials < 1) throw std::invalid_argument("sweep needs at least one trial per setting");

    const std::size_t total = spec.grid.size() * static_cast<std::size_t>(spec.trials);
    std::vector<TrialResult> results(total);
    const auto run_slot = [&](std::size_t slot) {
        const int setting = static_cast<int>(slot) / spec.trials;
        const int trial = static_cast<int>(slot) % spec.trials;
        results[slot] = run_trial(spec, setting, trial);
    };

    const int workers = std::max(1, trial_workers);
    if (workers == 1 || total <= 1) {
        for (std::size_t slot = 0; slot < total; ++slot) run_slot(slot);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), total);
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t slot = next.fetch_add(1);
                if (slot >= total) break;
                run_slot(slot);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

std::vector<SettingSummary> summarize(const SweepSpec& spec,
                                      const std::vector<TrialResult>& trials) {
    std::vector<SettingSummary> out;
    for (std::size_t s = 0; s < spec.grid.size(); ++s) {
        SettingSummary sum;
        sum.setting_index = static_cast<int>(s);
        sum.factor_value = spec.grid[s];
        std::vector<const TrialResult*> ok;
        for (const auto& t : trials) {
            if (t.setting_index != static_cast<int>(s)) continue;
            if (t.ok) {
                ok.push_back(&t);
            } else {
                ++sum.n_failed;
            }
        }
        sum.n_ok = static_cast<int>(ok.size());
        const auto mean_sd = [&](auto getter, double& mean, double& sd) {
            if (ok.empty()) return;
            double m = 0.0;
            for (const auto* t : ok) m += getter(*t);
            m /= static_cast<double>(ok.size());
            double v = 0.0;
            for (const auto* t : ok) {
                const double d = getter(*t) - m;
                v += d * d;
            }
            mean = m;
            sd = ok.size() > 1 ? std::sqrt(v / static_cast<double>(ok.size() - 1)) : 0.0;
        };
        mean_sd([](const TrialResult& t) { return t.report.f1; }, sum.f1_mean, sum.f1_sd);
        mean_sd([](const TrialResult& t) { return static_cast<double>(t.report.shd); },
                sum.shd_mean, sum.shd_sd);
        mean_sd([](const TrialResult& t) { return t.report.bsf; }, sum.bsf_mean, sum.bsf_sd);
        mean_sd([](const TrialResult& t) { return t.report.lag_mae; }, sum.lag_mae_mean,
                sum.lag_mae_sd);
        double unused_sd = 0.0;
        mean_sd([](const TrialResult& t) { return t.report.precision; }, sum.precision_mean,
                unused_sd);
        mean_sd([](const TrialResult& t) { return t.report.recall; }, sum.recall_mean, unused_sd);
        out.push_back(sum);
    }
    return out;
}

}  // namespace varlag
