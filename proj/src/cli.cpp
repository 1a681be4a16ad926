#include "varlag/cli.hpp"

#include "varlag/dataset.hpp"
#include "varlag/io.hpp"
#include "varlag/metrics.hpp"
#include "varlag/score.hpp"
#include "varlag/search.hpp"
#include "varlag/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

namespace varlag::cli {

namespace {

namespace fs = std::filesystem;

// Effective settings = defaults overridden by the config file, overridden by flags.
KeyValueConfig merged_config(const RunOptions& opts) {
    KeyValueConfig merged;
    if (!opts.config_path.empty()) {
        std::ifstream probe(opts.config_path);
        if (!probe) throw std::runtime_error("cannot open config file " + opts.config_path);
        merged = KeyValueConfig::parse_file(opts.config_path);
    }
    for (const auto& [key, value] : opts.overrides.entries()) merged.set(key, value);
    return merged;
}

struct LearnSettings {
    std::uint64_t seed = 0;
    int workers = 0;  // 0: resolve from env/cores
    ScoreConfig score;
    SearchConfig search;
    bool lambda_grid_enabled = false;
    std::vector<double> lambda_grid{0.0, 0.5, 1.0, 2.0, 4.0};
};

LearnSettings parse_learn_settings(const KeyValueConfig& cfg) {
    LearnSettings s;
    s.seed = cfg.get_u64("seed", 0);
    s.workers = cfg.get_int("workers", 0);
    s.score.lambda = cfg.get_double("lambda", 1.0);
    s.score.l_max = cfg.get_int("l_max", 3);
    s.score.irls.max_iter = cfg.get_int("irls_max_iter", 25);
    s.score.irls.tol = cfg.get_double("irls_tol", 1e-8);
    s.score.irls.ridge = cfg.get_double("irls_ridge", 1e-8);
    s.search.tabu_tenure = cfg.get_int("tabu_tenure", 10);
    s.search.max_tabu_iters = cfg.get_int("max_iters", 100);
    s.search.max_hc_iters = cfg.get_int("max_hc_iters", 200);
    s.search.l_max = s.score.l_max;
    s.search.seed = s.seed;
    s.search.tune_after_changelag = cfg.get_bool("tune_after_changelag", true);
    s.search.retune_both_on_reverse = cfg.get_bool("retune_both_on_reverse", true);
    s.search.tune_candidates = cfg.get_bool("tune_candidates", true);
    s.lambda_grid_enabled = cfg.get_bool("lambda_grid", false);
    if (cfg.has("lambda_grid_values")) {
        s.lambda_grid.clear();
        for (const auto& item : cfg.get_list("lambda_grid_values")) {
            s.lambda_grid.push_back(std::stod(item));
        }
    }

    if (s.score.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (s.score.l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    if (s.search.tabu_tenure < 0) throw std::invalid_argument("tabu_tenure must be >= 0");
    if (s.search.max_tabu_iters < 0 || s.search.max_hc_iters < 0) {
        throw std::invalid_argument("iteration caps must be >= 0");
    }
    if (s.score.irls.max_iter < 1) throw std::invalid_argument("irls_max_iter must be >= 1");
    if (s.workers < 0) throw std::invalid_argument("workers must be >= 0");
    if (s.lambda_grid_enabled && s.lambda_grid.empty()) {
        throw std::invalid_argument("lambda grid is empty");
    }
    return s;
}

GenConfig parse_gen_config(const KeyValueConfig& cfg) {
    GenConfig g;
    g.n_vars = cfg.get_int("n_vars", g.n_vars);
    g.t_len = cfg.get_int("t_len", g.t_len);
    g.p_edge = cfg.get_double("p_edge", g.p_edge);
    const std::string mode = cfg.get_string("lag_mode", "short");
    if (mode == "short") {
        g.lag_mode = LagMode::Short;
    } else if (mode == "long") {
        g.lag_mode = LagMode::Long;
    } else {
        throw std::invalid_argument("lag_mode must be short|long");
    }
    g.l_max = cfg.get_int("l_max", g.l_max);
    g.noise_sd = cfg.get_double("noise_sd", g.noise_sd);
    g.phi = cfg.get_double("phi", g.phi);
    g.frac_binary = cfg.get_double("frac_binary", g.frac_binary);
    g.n_confounders = cfg.get_int("n_confounders", g.n_confounders);
    const std::string missing = cfg.get_string("missing_mode", "none");
    if (missing == "none") {
        g.missing_mode = MissingMode::None;
    } else if (missing == "mcar") {
        g.missing_mode = MissingMode::MCAR;
    } else if (missing == "mar") {
        g.missing_mode = MissingMode::MAR;
    } else {
        throw std::invalid_argument("missing_mode must be none|mcar|mar");
    }
    g.missing_rate = cfg.get_double("missing_rate", g.missing_rate);
    g.seed = cfg.get_u64("seed", g.seed);
    g.validate();
    return g;
}

KeyValueConfig echo_learn(const LearnSettings& s, const std::string& data_csv,
                          int resolved_workers) {
    KeyValueConfig echo;
    echo.set("data", data_csv);
    echo.set("seed", std::to_string(s.seed));
    echo.set("workers", std::to_string(resolved_workers));
    echo.set("lambda", format_double(s.score.lambda));
    echo.set("l_max", std::to_string(s.score.l_max));
    echo.set("tabu_tenure", std::to_string(s.search.tabu_tenure));
    echo.set("max_iters", std::to_string(s.search.max_tabu_iters));
    echo.set("max_hc_iters", std::to_string(s.search.max_hc_iters));
    echo.set("irls_max_iter", std::to_string(s.score.irls.max_iter));
    echo.set("irls_tol", format_double(s.score.irls.tol));
    echo.set("irls_ridge", format_double(s.score.irls.ridge));
    echo.set("tune_after_changelag", s.search.tune_after_changelag ? "true" : "false");
    echo.set("retune_both_on_reverse", s.search.retune_both_on_reverse ? "true" : "false");
    echo.set("tune_candidates", s.search.tune_candidates ? "true" : "false");
    echo.set("lambda_grid", s.lambda_grid_enabled ? "true" : "false");
    return echo;
}

int io_error(const std::string& what) {
    std::cerr << "varlag: " << what << "\n";
    return kExitIo;
}

int config_error(const std::string& what) {
    std::cerr << "varlag: invalid configuration: " << what << "\n";
    return kExitBadConfig;
}

}  // namespace

int cmd_learn(const std::string& data_csv, const std::string& out_dir, const RunOptions& opts) {
    LearnSettings settings;
    KeyValueConfig merged;
    try {
        merged = merged_config(opts);
    } catch (const std::exception& e) {
        const std::string what = e.what();
        return what.find("cannot open") != std::string::npos ? io_error(what)
                                                             : config_error(what);
    }
    try {
        settings = parse_learn_settings(merged);
    } catch (const std::exception& e) {
        return config_error(e.what());
    }

    TimeSeriesDataset raw;
    try {
        raw = load_csv(data_csv);
    } catch (const std::exception& e) {
        return io_error(e.what());
    }

    TimeSeriesDataset ds;
    try {
        ds = impute(raw);
        if (ds.t_len <= settings.score.l_max) {
            throw std::runtime_error("dataset has T <= l_max; no usable design rows");
        }
    } catch (const std::exception& e) {
        std::cerr << "varlag: inadmissible dataset: " << e.what() << "\n";
        return kExitBadDataset;
    }

    const int workers = settings.workers > 0 ? settings.workers : default_worker_count();
    settings.search.workers = workers;

    try {
        KeyValueConfig echo = echo_learn(settings, data_csv, workers);
        if (settings.lambda_grid_enabled) {
            const LambdaSelection sel =
                select_lambda(ds, settings.lambda_grid, settings.search, settings.score);
            settings.score.lambda = sel.lambda;
            echo.set("lambda_selected", format_double(sel.lambda));
            std::string lls;
            for (const auto& [lambda, ll] : sel.tail_log_lik) {
                if (!lls.empty()) lls += ", ";
                lls += format_double(lambda) + ":" + format_double(ll);
            }
            echo.set("lambda_grid_tail_log_lik", lls);
        }

        const LearnResult result = learn(ds, settings.search, settings.score);

        fs::create_directories(out_dir);
        const fs::path out(out_dir);
        write_file((out / "graph.json").string(),
                   graph_to_json(result.best_graph, ds.names).dump(2) + "\n");
        write_file((out / "edges.csv").string(), edges_to_csv(result.best_graph, ds.names));
        write_file((out / "trace.jsonl").string(), trace_to_jsonl(result.trace));
        write_file((out / "score_report.json").string(),
                   score_report_to_json(result.best_graph, ds.names, result.best_score,
                                        result.cards)
                           .dump(2) +
                       "\n");
        write_file((out / "config_echo.txt").string(), echo.serialize());
    } catch (const std::invalid_argument& e) {
        return config_error(e.what());
    } catch (const std::exception& e) {
        return io_error(e.what());
    }
    return kExitOk;
}

int cmd_simulate(const std::string& out_dir, const RunOptions& opts) {
    GenConfig gen;
    try {
        gen = parse_gen_config(merged_config(opts));
    } catch (const std::exception& e) {
        const std::string what = e.what();
        return what.find("cannot open") != std::string::npos ? io_error(what)
                                                             : config_error(what);
    }

    try {
        const GroundTruth truth = generate_truth(gen);
        const TimeSeriesDataset clean = simulate(truth, gen);
        const TimeSeriesDataset masked = apply_missingness(clean, gen);

        fs::create_directories(out_dir);
        const fs::path out(out_dir);
        write_file((out / "data.csv").string(), dataset_to_csv(masked));
        write_file((out / "truth.json").string(), truth_to_json(truth, masked.names).dump(2) + "\n");
        write_file((out / "mask.csv").string(), mask_to_csv(masked));

        KeyValueConfig echo;
        echo.set("n_vars", std::to_string(gen.n_vars));
        echo.set("t_len", std::to_string(gen.t_len));
        echo.set("p_edge", format_double(gen.p_edge));
        echo.set("lag_mode", to_string(gen.lag_mode));
        echo.set("l_max", std::to_string(gen.l_max));
        echo.set("noise_sd", format_double(gen.noise_sd));
        echo.set("phi", format_double(gen.phi));
        echo.set("frac_binary", format_double(gen.frac_binary));
        echo.set("n_confounders", std::to_string(gen.n_confounders));
        echo.set("missing_mode", to_string(gen.missing_mode));
        echo.set("missing_rate", format_double(gen.missing_rate));
        echo.set("seed", std::to_string(gen.seed));
        write_file((out / "config_echo.txt").string(), echo.serialize());
    } catch (const std::exception& e) {
        return io_error(e.what());
    }
    return kExitOk;
}

namespace {

SweepSpec parse_sweep_spec(const KeyValueConfig& cfg) {
    SweepSpec spec;
    spec.name = cfg.get_string("name", "sweep");
    spec.factor = cfg.get_string("factor", "");
    if (spec.factor.empty()) throw std::invalid_argument("sweep spec needs a factor");
    spec.grid = cfg.get_list("grid");
    if (spec.grid.empty()) throw std::invalid_argument("sweep spec needs a non-empty grid");
    spec.trials = cfg.get_int("trials", 5);
    spec.seed = cfg.get_u64("seed", 0);
    static const std::set<std::string> known_factors{
        "n_vars", "t_len",       "p_edge",        "lag_mode",  "noise_sd",
        "phi",    "frac_binary", "n_confounders", "mcar_rate", "mar_rate"};
    if (known_factors.count(spec.factor) == 0) {
        throw std::invalid_argument("unknown sweep factor: " + spec.factor);
    }
    spec.baseline = parse_gen_config(cfg);

    const LearnSettings learn_settings = parse_learn_settings(cfg);
    spec.score = learn_settings.score;
    spec.search = learn_settings.search;
    spec.search.workers = 1;  // parallelism happens at the trial level
    return spec;
}

// No timing columns: re-running a spec must overwrite byte-identically.
std::string trials_to_csv(const SweepSpec& spec, const std::vector<TrialResult>& trials) {
    std::string out = "sweep,factor,value,setting_index,trial,seed,ok,n_true_edges,"
                      "n_learnt_edges," +
                      report_csv_header() + ",error\n";
    for (const auto& t : trials) {
        out += spec.name + ',' + spec.factor + ',' + t.factor_value + ',';
        out += std::to_string(t.setting_index) + ',' + std::to_string(t.trial) + ',' +
               std::to_string(t.seed) + ',';
        out += (t.ok ? "1" : "0");
        out += ',' + std::to_string(t.n_true_edges) + ',' +
               std::to_string(t.n_learnt_edges) + ',';
        out += report_to_csv_row(t.report) + ',';
        std::string err = t.error;
        for (auto& c : err) {
            if (c == ',' || c == '\n') c = ';';
        }
        out += err + '\n';
    }
    return out;
}

std::string summary_to_csv(const SweepSpec& spec, const std::vector<SettingSummary>& rows) {
    std::string out =
        "sweep,factor,value,n_ok,n_failed,f1_mean,f1_sd,shd_mean,shd_sd,bsf_mean,bsf_sd,"
        "lag_mae_mean,lag_mae_sd,precision_mean,recall_mean\n";
    for (const auto& r : rows) {
        out += spec.name + ',' + spec.factor + ',' + r.factor_value + ',';
        out += std::to_string(r.n_ok) + ',' + std::to_string(r.n_failed) + ',';
        out += format_double(r.f1_mean) + ',' + format_double(r.f1_sd) + ',';
        out += format_double(r.shd_mean) + ',' + format_double(r.shd_sd) + ',';
        out += format_double(r.bsf_mean) + ',' + format_double(r.bsf_sd) + ',';
        out += format_double(r.lag_mae_mean) + ',' + format_double(r.lag_mae_sd) + ',';
        out += format_double(r.precision_mean) + ',' + format_double(r.recall_mean) + '\n';
    }
    return out;
}

}  // namespace

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, const RunOptions& opts) {
    SweepSpec spec;
    int workers = 0;
    try {
        std::ifstream probe(spec_path);
        if (!probe) return io_error("cannot open sweep spec " + spec_path);
        KeyValueConfig cfg = KeyValueConfig::parse_file(spec_path);
        for (const auto& [key, value] : opts.overrides.entries()) cfg.set(key, value);
        if (!opts.config_path.empty()) {
            return config_error("sweep takes its settings from the spec file and flags");
        }
        spec = parse_sweep_spec(cfg);
        workers = cfg.get_int("workers", 0);
        if (workers < 0) throw std::invalid_argument("workers must be >= 0");
    } catch (const std::exception& e) {
        return config_error(e.what());
    }
    if (workers == 0) workers = default_worker_count();

    try {
        const std::vector<TrialResult> trials = run_sweep(spec, workers);
        const std::vector<SettingSummary> rows = summarize(spec, trials);

        fs::create_directories(out_dir);
        const fs::path out(out_dir);
        write_file((out / "trials.csv").string(), trials_to_csv(spec, trials));
        write_file((out / "summary.csv").string(), summary_to_csv(spec, rows));

        KeyValueConfig echo = KeyValueConfig::parse_file(spec_path);
        for (const auto& [key, value] : opts.overrides.entries()) echo.set(key, value);
        echo.set("workers", std::to_string(workers));
        write_file((out / "config_echo.txt").string(), echo.serialize());

        int ok = 0;
        for (const auto& t : trials) ok += t.ok ? 1 : 0;
        const double ok_fraction = trials.empty() ? 0.0 : static_cast<double>(ok) / trials.size();
        if (ok_fraction < 0.8) {
            std::cerr << "varlag: only " << ok << "/" << trials.size() << " trials succeeded\n";
            return kExitSweepFailures;
        }
    } catch (const std::exception& e) {
        return io_error(e.what());
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& learnt_path, const std::string& truth_path,
                 std::string* out_json) {
    NamedGraph learnt, truth;
    try {
        learnt = graph_from_json(nlohmann::json::parse(read_file(learnt_path)));
        truth = graph_from_json(nlohmann::json::parse(read_file(truth_path)));
    } catch (const std::exception& e) {
        return io_error(e.what());
    }

    try {
        if (learnt.names != truth.names) {
            // Allow a permuted variable order when the name sets agree.
            std::map<std::string, int> index;
            for (std::size_t i = 0; i < learnt.names.size(); ++i) {
                index[learnt.names[i]] = static_cast<int>(i);
            }
            if (learnt.names.size() != truth.names.size()) {
                throw std::invalid_argument("variable sets differ");
            }
            LaggedGraph remapped(static_cast<int>(learnt.names.size()));
            for (const auto& e : truth.graph.edges()) {
                const auto p = index.find(truth.names[static_cast<std::size_t>(e.parent)]);
                const auto c = index.find(truth.names[static_cast<std::size_t>(e.child)]);
                if (p == index.end() || c == index.end()) {
                    throw std::invalid_argument("variable sets differ");
                }
                remapped.add_edge(p->second, c->second, e.lag);
            }
            truth.graph = remapped;
            truth.names = learnt.names;
        }
        const StructuralReport report = compare(learnt.graph, truth.graph);
        const std::string text = report_to_json(report).dump(2) + "\n";
        if (out_json != nullptr) {
            *out_json = text;
        } else {
            std::cout << text;
        }
    } catch (const std::exception& e) {
        std::cerr << "varlag: " << e.what() << "\n";
        return kExitBadConfig;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Time-ordered causal graph learning with edge-specific lags"};
    app.require_subcommand(1);

    std::string data_csv, out_dir, config_path, spec_path, learnt_path, truth_path;
    std::map<std::string, std::string> flag_keys;

    const auto add_common = [&flag_keys](CLI::App* sub) {
        const auto bind = [&flag_keys, sub](const std::string& flag, const std::string& key,
                                            const std::string& help) {
            sub->add_option_function<std::string>(
                   flag, [&flag_keys, key](const std::string& v) { flag_keys[key] = v; }, help)
                ->expected(1);
        };
        bind("--seed", "seed", "RNG seed");
        bind("--workers", "workers", "worker threads (0 = logical cores)");
        bind("--lambda", "lambda", "lag-penalty weight");
        bind("--l-max", "l_max", "maximum edge lag");
        bind("--tabu-tenure", "tabu_tenure", "tabu tenure");
        bind("--max-iters", "max_iters", "tabu iteration cap");
        bind("--max-hc-iters", "max_hc_iters", "hill-climb iteration cap");
    };

    auto* learn_cmd = app.add_subcommand("learn", "learn a lagged graph from CSV time series");
    learn_cmd->add_option("data", data_csv, "input CSV")->required();
    learn_cmd->add_option("--out", out_dir, "output directory")->required();
    learn_cmd->add_option("--config", config_path, "key = value config file");
    add_common(learn_cmd);
    bool lambda_grid_flag = false;
    learn_cmd->add_flag("--lambda-grid", lambda_grid_flag,
                        "select lambda on a small grid by held-out tail log-likelihood");

    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic benchmark dataset");
    sim_cmd->add_option("--out", out_dir, "output directory")->required();
    sim_cmd->add_option("--config", config_path, "key = value config file");
    add_common(sim_cmd);
    for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
             {"--n-vars", "n_vars"},
             {"--t-len", "t_len"},
             {"--p-edge", "p_edge"},
             {"--lag-mode", "lag_mode"},
             {"--noise-sd", "noise_sd"},
             {"--phi", "phi"},
             {"--frac-binary", "frac_binary"},
             {"--confounders", "n_confounders"},
             {"--missing-mode", "missing_mode"},
             {"--missing-rate", "missing_rate"}}) {
        sim_cmd->add_option_function<std::string>(
                   flag, [&flag_keys, key = key](const std::string& v) { flag_keys[key] = v; }, "")
            ->expected(1);
    }

    auto* sweep_cmd = app.add_subcommand("sweep", "run a one-factor-at-a-time simulation sweep");
    sweep_cmd->add_option("spec", spec_path, "sweep spec file")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory")->required();
    add_common(sweep_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "compare a learnt graph against truth");
    eval_cmd->add_option("learnt", learnt_path, "learnt graph JSON")->required();
    eval_cmd->add_option("truth", truth_path, "truth graph JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadConfig;
    }

    RunOptions opts;
    opts.config_path = config_path;
    for (const auto& [key, value] : flag_keys) opts.overrides.set(key, value);
    if (lambda_grid_flag) opts.overrides.set("lambda_grid", "true");

    if (learn_cmd->parsed()) return cmd_learn(data_csv, out_dir, opts);
    if (sim_cmd->parsed()) return cmd_simulate(out_dir, opts);
    if (sweep_cmd->parsed()) return cmd_sweep(spec_path, out_dir, opts);
    if (eval_cmd->parsed()) return cmd_evaluate(learnt_path, truth_path);
    return kExitBadConfig;
}

}  // namespace varlag::cli
