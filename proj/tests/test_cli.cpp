#include "varlag/cli.hpp"

#include "varlag/io.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace varlag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_scratch") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& child) const { return (path / child).string(); }
};

cli::RunOptions options(std::initializer_list<std::pair<std::string, std::string>> kv,
                        const std::string& config_path = "") {
    cli::RunOptions opts;
    opts.config_path = config_path;
    for (const auto& [k, v] : kv) opts.overrides.set(k, v);
    return opts;
}

std::string simulate_toy(const TempDir& dir, std::initializer_list<std::pair<std::string, std::string>> extra = {}) {
    cli::RunOptions opts = options({{"n_vars", "3"},
                                    {"t_len", "150"},
                                    {"p_edge", "0.3"},
                                    {"l_max", "2"},
                                    {"seed", "5"}});
    for (const auto& [k, v] : extra) opts.overrides.set(k, v);
    REQUIRE(cli::cmd_simulate(dir / "sim", opts) == cli::kExitOk);
    return dir / "sim";
}

}  // namespace

TEST_CASE("simulate writes data, truth and mask; p_edge zero means no edges") {
    TempDir dir("simulate");
    const auto out = [&] {
        cli::RunOptions opts = options(
            {{"n_vars", "4"}, {"t_len", "100"}, {"p_edge", "0"}, {"l_max", "2"}, {"seed", "1"}});
        REQUIRE(cli::cmd_simulate(dir / "sim0", opts) == cli::kExitOk);
        return dir / "sim0";
    }();
    const auto truth = nlohmann::json::parse(read_file(out + "/truth.json"));
    CHECK(truth.at("graph").at("edges").empty());
    CHECK(fs::exists(out + "/data.csv"));
    CHECK(fs::exists(out + "/mask.csv"));
    CHECK(fs::exists(out + "/config_echo.txt"));
}

TEST_CASE("simulate with MCAR leaves empty cells where the mask fires") {
    TempDir dir("simulate_mcar");
    cli::RunOptions opts = options({{"n_vars", "3"},
                                    {"t_len", "200"},
                                    {"p_edge", "0.2"},
                                    {"l_max", "2"},
                                    {"missing_mode", "mcar"},
                                    {"missing_rate", "0.1"},
                                    {"seed", "2"}});
    REQUIRE(cli::cmd_simulate(dir / "sim", opts) == cli::kExitOk);
    const std::string data = read_file(dir / "sim" + std::string("/data.csv"));
    CHECK(data.find(",,") != std::string::npos);  // at least one masked interior cell

    const std::string mask = read_file(dir / "sim" + std::string("/mask.csv"));
    CHECK(mask.find('1') != std::string::npos);
}

TEST_CASE("simulate at benchmark scale finishes within the smoke bound") {
    TempDir dir("simulate_speed");
    const auto started = std::chrono::steady_clock::now();
    REQUIRE(cli::cmd_simulate(dir / "sim",
                              options({{"n_vars", "4"}, {"t_len", "500"}, {"seed", "3"}})) ==
            cli::kExitOk);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    CHECK(seconds < 5.0);
}

TEST_CASE("simulate rejects invalid configs with exit 3") {
    TempDir dir("simulate_bad");
    CHECK(cli::cmd_simulate(dir / "out", options({{"p_edge", "1.5"}})) == cli::kExitBadConfig);
    CHECK(cli::cmd_simulate(dir / "out", options({{"lag_mode", "medium"}})) ==
          cli::kExitBadConfig);
}

TEST_CASE("learn writes all artifacts and is byte-deterministic") {
    TempDir dir("learn");
    const auto sim = simulate_toy(dir);

    const auto opts = options({{"seed", "7"}, {"l_max", "2"}, {"max_iters", "10"},
                               {"max_hc_iters", "30"}});
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "run1", opts) == cli::kExitOk);
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "run2", opts) == cli::kExitOk);

    for (const auto* name : {"graph.json", "edges.csv", "trace.jsonl", "score_report.json",
                             "config_echo.txt"}) {
        CAPTURE(name);
        CHECK(fs::exists(fs::path(dir / "run1") / name));
        CHECK(read_file((fs::path(dir / "run1") / name).string()) ==
              read_file((fs::path(dir / "run2") / name).string()));
    }

    const auto graph = graph_from_json(nlohmann::json::parse(read_file(dir / "run1" + std::string("/graph.json"))));
    CHECK(graph.names.size() == 3);

    // Each trace line is a standalone JSON record with the four fixed keys.
    std::stringstream trace(read_file(dir / "run1" + std::string("/trace.jsonl")));
    std::string line;
    int iter = 0;
    while (std::getline(trace, line)) {
        const auto record = nlohmann::json::parse(line);
        CHECK(record.at("iter").get<int>() == ++iter);
        CHECK(record.contains("move"));
        CHECK(record.contains("score"));
        CHECK(record.contains("best_score"));
        CHECK(record.size() == 4);
    }
    const auto report = nlohmann::json::parse(read_file(dir / "run1" + std::string("/score_report.json")));
    CHECK(report.contains("score"));
    CHECK(report.contains("log_likelihood"));
    CHECK(report.contains("bic_2ll_minus_plogn"));
    CHECK(report.contains("lag_histogram"));
    CHECK(report.contains("frac_lag_gt1"));
    CHECK(report.at("nodes").size() == 3);
}

TEST_CASE("learn with workers 1 and workers 4 produces identical edges.csv") {
    TempDir dir("learn_workers");
    const auto sim = simulate_toy(dir, {{"p_edge", "0.4"}, {"t_len", "200"}});
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "w1",
                           options({{"workers", "1"}, {"l_max", "2"}, {"max_iters", "8"}})) ==
            cli::kExitOk);
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "w4",
                           options({{"workers", "4"}, {"l_max", "2"}, {"max_iters", "8"}})) ==
            cli::kExitOk);
    CHECK(read_file(dir / "w1" + std::string("/edges.csv")) ==
          read_file(dir / "w4" + std::string("/edges.csv")));
    CHECK(read_file(dir / "w1" + std::string("/graph.json")) ==
          read_file(dir / "w4" + std::string("/graph.json")));
}

TEST_CASE("learn exit codes") {
    TempDir dir("learn_errors");
    SUBCASE("missing input file is an I/O error") {
        CHECK(cli::cmd_learn("no_such.csv", dir / "out", options({})) == cli::kExitIo);
    }
    SUBCASE("invalid config value") {
        const auto sim = simulate_toy(dir);
        CHECK(cli::cmd_learn(sim + "/data.csv", dir / "out", options({{"lambda", "-1"}})) ==
              cli::kExitBadConfig);
    }
    SUBCASE("T <= l_max is an inadmissible dataset") {
        std::ofstream csv(dir / "tiny.csv");
        csv << "a,b\n1,2\n3,4\n";
        csv.close();
        CHECK(cli::cmd_learn(dir / "tiny.csv", dir / "out", options({{"l_max", "5"}})) ==
              cli::kExitBadDataset);
    }
    SUBCASE("unparseable config file") {
        std::ofstream conf(dir / "broken.conf");
        conf << "this is not a key value line\n";
        conf.close();
        const auto sim = simulate_toy(dir);
        CHECK(cli::cmd_learn(sim + "/data.csv", dir / "out",
                             options({}, dir / "broken.conf")) == cli::kExitBadConfig);
    }
}

TEST_CASE("flag values override config-file values which override defaults") {
    TempDir dir("precedence");
    const auto sim = simulate_toy(dir);

    std::ofstream conf(dir / "run.conf");
    conf << "lambda = 2.5\nl_max = 2\nmax_iters = 5\n";
    conf.close();

    // Default lambda is 1.
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "defaults",
                           options({{"l_max", "2"}, {"max_iters", "5"}})) == cli::kExitOk);
    CHECK(read_file(dir / "defaults" + std::string("/config_echo.txt"))
              .find("lambda = 1\n") != std::string::npos);

    // Config file wins over the default.
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "file", options({}, dir / "run.conf")) ==
            cli::kExitOk);
    CHECK(read_file(dir / "file" + std::string("/config_echo.txt")).find("lambda = 2.5\n") !=
          std::string::npos);

    // Flag wins over the config file.
    REQUIRE(cli::cmd_learn(sim + "/data.csv", dir / "flag",
                           options({{"lambda", "0.5"}}, dir / "run.conf")) == cli::kExitOk);
    CHECK(read_file(dir / "flag" + std::string("/config_echo.txt")).find("lambda = 0.5\n") !=
          std::string::npos);
}

TEST_CASE("evaluate prints the structural report") {
    TempDir dir("evaluate");
    const auto sim = simulate_toy(dir, {{"p_edge", "0.5"}});

    SUBCASE("graph against itself is perfect") {
        std::string json;
        REQUIRE(cli::cmd_evaluate(sim + "/truth.json", sim + "/truth.json", &json) ==
                cli::kExitOk);
        const auto report = nlohmann::json::parse(json);
        CHECK(report.at("f1").get<double>() == doctest::Approx(1.0));
        CHECK(report.at("shd").get<int>() == 0);
    }
    SUBCASE("empty learnt graph against a nonempty truth has bsf zero") {
        const auto truth = nlohmann::json::parse(read_file(sim + "/truth.json"));
        nlohmann::json empty = truth.at("graph");
        empty["edges"] = nlohmann::json::array();
        write_file(dir / "empty.json", empty.dump());
        std::string json;
        REQUIRE(cli::cmd_evaluate(dir / "empty.json", sim + "/truth.json", &json) == cli::kExitOk);
        CHECK(nlohmann::json::parse(json).at("bsf").get<double>() == doctest::Approx(0.0));
    }
    SUBCASE("a permuted variable order with the same name set is remapped") {
        const auto truth = nlohmann::json::parse(read_file(sim + "/truth.json"));
        const auto graph = truth.at("graph");
        nlohmann::json permuted = graph;
        // Rotate names and re-index edges to match.
        const auto names = graph.at("names").get<std::vector<std::string>>();
        std::vector<std::string> rotated(names.rbegin(), names.rend());
        permuted["names"] = rotated;
        const int n = static_cast<int>(names.size());
        for (auto& e : permuted["edges"]) {
            e["parent"] = n - 1 - e["parent"].get<int>();
            e["child"] = n - 1 - e["child"].get<int>();
        }
        write_file(dir / "permuted.json", permuted.dump());
        std::string json;
        REQUIRE(cli::cmd_evaluate(dir / "permuted.json", sim + "/truth.json", &json) ==
                cli::kExitOk);
        CHECK(nlohmann::json::parse(json).at("f1").get<double>() == doctest::Approx(1.0));
    }
    SUBCASE("malformed JSON exits 2") {
        write_file(dir / "broken.json", "{not json");
        CHECK(cli::cmd_evaluate(dir / "broken.json", sim + "/truth.json", nullptr) ==
              cli::kExitIo);
    }
    SUBCASE("variable-set mismatch exits 3") {
        nlohmann::json other = {{"n_vars", 2},
                                {"names", {"alpha", "beta"}},
                                {"edges", nlohmann::json::array()}};
        write_file(dir / "other.json", other.dump());
        CHECK(cli::cmd_evaluate(dir / "other.json", sim + "/truth.json", nullptr) ==
              cli::kExitBadConfig);
    }
}

TEST_CASE("sweep runs a two-point grid and overwrites deterministically") {
    TempDir dir("sweep");
    std::ofstream spec(dir / "spec.conf");
    spec << "name = smoke\n"
            "factor = t_len\n"
            "grid = 80, 140\n"
            "trials = 2\n"
            "seed = 4\n"
            "n_vars = 3\n"
            "t_len = 100\n"
            "p_edge = 0.3\n"
            "l_max = 2\n"
            "max_hc_iters = 20\n"
            "max_iters = 5\n"
            "workers = 2\n";
    spec.close();

    REQUIRE(cli::cmd_sweep(dir / "spec.conf", dir / "out", options({})) == cli::kExitOk);
    const std::string trials = read_file(dir / "out" + std::string("/trials.csv"));
    const std::string summary = read_file(dir / "out" + std::string("/summary.csv"));
    CHECK(std::count(trials.begin(), trials.end(), '\n') == 5);   // header + 4 trials
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);  // header + 2 settings

    REQUIRE(cli::cmd_sweep(dir / "spec.conf", dir / "out", options({})) == cli::kExitOk);
    CHECK(read_file(dir / "out" + std::string("/trials.csv")) == trials);
    CHECK(read_file(dir / "out" + std::string("/summary.csv")) == summary);

    SUBCASE("invalid spec exits 3") {
        std::ofstream bad(dir / "bad.conf");
        bad << "factor = nope\ngrid = 1\n";
        bad.close();
        CHECK(cli::cmd_sweep(dir / "bad.conf", dir / "out2", options({})) ==
              cli::kExitBadConfig);
    }
    SUBCASE("mostly failing trials exit 5 but still write the flagged rows") {
        std::ofstream bad(dir / "failing.conf");
        bad << "name = failing\nfactor = t_len\ngrid = bogus\ntrials = 2\nseed = 1\n"
               "n_vars = 3\nt_len = 100\nl_max = 2\nworkers = 1\n";
        bad.close();
        CHECK(cli::cmd_sweep(dir / "failing.conf", dir / "out3", options({})) ==
              cli::kExitSweepFailures);
        const std::string trials = read_file(dir / "out3" + std::string("/trials.csv"));
        CHECK(std::count(trials.begin(), trials.end(), '\n') == 3);
        CHECK(trials.find(",0,") != std::string::npos);  // ok flag cleared
    }
}

TEST_CASE("the shipped sweep specs cover the ten-sweep structure") {
    const fs::path sweeps = fs::path(VARLAG_SOURCE_DIR) / "sweeps";
    REQUIRE(fs::exists(sweeps));
    std::set<std::string> factors;
    int count = 0;
    for (const auto& entry : fs::directory_iterator(sweeps)) {
        if (entry.path().extension() != ".conf") continue;
        ++count;
        const auto cfg = KeyValueConfig::parse_file(entry.path().string());
        CHECK(cfg.has("factor"));
        CHECK_FALSE(cfg.get_list("grid").empty());
        factors.insert(cfg.get_string("factor", ""));
    }
    CHECK(count == 10);
    CHECK(factors.size() == 10);  // one file per varied factor
    CHECK(factors.count("mcar_rate") == 1);
    CHECK(factors.count("mar_rate") == 1);
}
