#include "varlag/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace varlag {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

json graph_to_json(const LaggedGraph& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != g.n_vars()) {
        throw std::invalid_argument("name list length disagrees with graph");
    }
    json edges = json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"parent", e.parent}, {"child", e.child}, {"lag", e.lag}});
    }
    return json{{"n_vars", g.n_vars()}, {"names", names}, {"edges", edges}};
}

NamedGraph graph_from_json(const json& j) {
    const json& obj = j.contains("graph") ? j.at("graph") : j;
    NamedGraph out;
    const int n = obj.at("n_vars").get<int>();
    out.graph = LaggedGraph(n);
    out.names = obj.at("names").get<std::vector<std::string>>();
    if (static_cast<int>(out.names.size()) != n) {
        throw std::runtime_error("graph JSON: names length disagrees with n_vars");
    }
    for (const auto& e : obj.at("edges")) {
        out.graph.add_edge(e.at("parent").get<int>(), e.at("child").get<int>(),
                           e.at("lag").get<int>());
    }
    return out;
}

std::string edges_to_csv(const LaggedGraph& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != g.n_vars()) {
        throw std::invalid_argument("name list length disagrees with graph");
    }
    std::string out = "parent,child,lag\n";
    for (const auto& e : g.edges()) {
        out += names[static_cast<std::size_t>(e.parent)];
        out += ',';
        out += names[static_cast<std::size_t>(e.child)];
        out += ',';
        out += std::to_string(e.lag);
        out += '\n';
    }
    return out;
}

LaggedGraph edges_from_csv(const std::string& csv, const std::vector<std::string>& names) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
    LaggedGraph g(static_cast<int>(names.size()));

    std::stringstream ss(csv);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("empty edge CSV");
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string parent, child, lag;
        if (!std::getline(row, parent, ',') || !std::getline(row, child, ',') ||
            !std::getline(row, lag, ',')) {
            throw std::runtime_error("malformed edge CSV row: " + line);
        }
        const auto pi = index.find(parent);
        const auto ci = index.find(child);
        if (pi == index.end() || ci == index.end()) {
            throw std::runtime_error("edge CSV names unknown variable: " + line);
        }
        g.add_edge(pi->second, ci->second, std::stoi(lag));
    }
    return g;
}

std::string trace_to_jsonl(const SearchTrace& trace) {
    std::string out;
    int iter = 0;
    for (const auto& step : trace.steps) {
        json move{{"kind", to_string(step.move.kind)},
                  {"parent", step.move.edge.parent},
                  {"child", step.move.edge.child}};
        if (step.move.kind == MoveKind::ChangeLag) {
            move["new_lag"] = step.move.new_lag;
        }
        const json record{{"iter", ++iter},
                          {"move", move},
                          {"score", step.score_after},
                          {"best_score", step.best_so_far}};
        out += record.dump();
        out += '\n';
    }
    return out;
}

json report_to_json(const StructuralReport& r) {
    return json{{"tp", r.tp},
                {"tn", r.tn},
                {"fp", r.fp},
                {"fn", r.fn},
                {"n_add", r.n_add},
                {"n_del", r.n_del},
                {"n_rev", r.n_rev},
                {"precision", r.precision},
                {"recall", r.recall},
                {"f1", r.f1},
                {"shd", r.shd},
                {"bsf", r.bsf},
                {"lag_mae", r.lag_mae},
                {"lag_mae_defined", r.lag_mae_defined},
                {"n_matched_adjacencies", r.n_matched_adjacencies}};
}

std::string report_csv_header() {
    return "tp,tn,fp,fn,n_add,n_del,n_rev,precision,recall,f1,shd,bsf,lag_mae,lag_mae_defined,"
           "n_matched_adjacencies";
}

std::string report_to_csv_row(const StructuralReport& r) {
    std::string out;
    out += std::to_string(r.tp) + ',' + std::to_string(r.tn) + ',' + std::to_string(r.fp) + ',' +
           std::to_string(r.fn) + ',';
    out += std::to_string(r.n_add) + ',' + std::to_string(r.n_del) + ',' + std::to_string(r.n_rev) +
           ',';
    out += format_double(r.precision) + ',' + format_double(r.recall) + ',' + format_double(r.f1) +
           ',';
    out += std::to_string(r.shd) + ',' + format_double(r.bsf) + ',' + format_double(r.lag_mae) +
           ',';
    out += std::string(r.lag_mae_defined ? "1" : "0") + ',' +
           std::to_string(r.n_matched_adjacencies);
    return out;
}

json truth_to_json(const GroundTruth& truth, const std::vector<std::string>& names) {
    json coefs = json::array();
    for (const auto& [edge, beta] : truth.coefficients) {
        coefs.push_back(
            {{"parent", edge.parent}, {"child", edge.child}, {"lag", edge.lag}, {"beta", beta}});
    }
    json confounders = json::array();
    for (const auto& spec : truth.confounders) {
        json wires = json::array();
        for (const auto& w : spec.wires) {
            wires.push_back({{"target", w.target}, {"lag", w.lag}, {"beta", w.beta}});
        }
        confounders.push_back({{"phi", spec.phi}, {"wires", wires}});
    }
    std::vector<std::string> kind_names;
    for (const auto kind : truth.kinds) kind_names.emplace_back(to_string(kind));
    return json{{"graph", graph_to_json(truth.graph, names)},
                {"kinds", kind_names},
                {"intercepts", truth.intercepts},
                {"coefficients", coefs},
                {"confounders", confounders}};
}

GroundTruth truth_from_json(const json& j) {
    GroundTruth truth;
    truth.graph = graph_from_json(j.at("graph")).graph;
    for (const auto& k : j.at("kinds")) {
        truth.kinds.push_back(k.get<std::string>() == "binary" ? VariableKind::Binary
                                                               : VariableKind::Continuous);
    }
    truth.intercepts = j.at("intercepts").get<std::vector<double>>();
    for (const auto& c : j.at("coefficients")) {
        truth.coefficients.push_back(
            {{c.at("parent").get<int>(), c.at("child").get<int>(), c.at("lag").get<int>()},
             c.at("beta").get<double>()});
    }
    if (j.contains("confounders")) {
        for (const auto& spec : j.at("confounders")) {
            ConfounderSpec cs;
            cs.phi = spec.at("phi").get<double>();
            for (const auto& w : spec.at("wires")) {
                cs.wires.push_back({w.at("target").get<int>(), w.at("lag").get<int>(),
                                    w.at("beta").get<double>()});
            }
            truth.confounders.push_back(cs);
        }
    }
    return truth;
}

json score_report_to_json(const LaggedGraph& g, const std::vector<std::string>& names,
                          double total_score, const std::vector<NodeScoreCard>& cards) {
    double total_ll = 0.0;
    double total_bic = 0.0;  // 2*logL - p*log(n) convention, lag penalty excluded
    json card_list = json::array();
    for (const auto& card : cards) {
        total_ll += card.log_lik;
        const double bic = 2.0 * card.log_lik -
                           static_cast<double>(card.p) * std::log(static_cast<double>(card.n_eff));
        total_bic += bic;
        card_list.push_back({{"child", card.child},
                             {"name", names[static_cast<std::size_t>(card.child)]},
                             {"local_score", card.local_score},
                             {"log_lik", card.log_lik},
                             {"p", card.p},
                             {"n_eff", card.n_eff},
                             {"lag_penalty", card.lag_penalty},
                             {"admissible", card.admissible}});
    }
    std::map<int, int> lag_counts;
    double lag_sum = 0.0;
    int beyond_one = 0;
    for (const auto& e : g.edges()) {
        ++lag_counts[e.lag];
        lag_sum += e.lag;
        if (e.lag > 1) ++beyond_one;
    }
    json histogram = json::object();
    for (const auto& [lag, count] : lag_counts) histogram[std::to_string(lag)] = count;
    const int n_edges = g.n_edges();
    return json{{"score", total_score},
                {"log_likelihood", total_ll},
                {"bic_2ll_minus_plogn", total_bic},
                {"n_edges", n_edges},
                {"average_lag", n_edges > 0 ? lag_sum / n_edges : 0.0},
                {"frac_lag_gt1", n_edges > 0 ? static_cast<double>(beyond_one) / n_edges : 0.0},
                {"lag_histogram", histogram},
                {"nodes", card_list}};
}

std::string dataset_to_csv(const TimeSeriesDataset& ds) {
    std::string out;
    for (int i = 0; i < ds.n_vars; ++i) {
        if (i > 0) out += ',';
        out += ds.names[static_cast<std::size_t>(i)];
    }
    out += '\n';
    for (int t = 0; t < ds.t_len; ++t) {
        for (int i = 0; i < ds.n_vars; ++i) {
            if (i > 0) out += ',';
            if (!ds.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) {
                out += format_double(ds.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
            }
        }
        out += '\n';
    }
    return out;
}

std::string mask_to_csv(const TimeSeriesDataset& ds) {
    std::string out;
    for (int i = 0; i < ds.n_vars; ++i) {
        if (i > 0) out += ',';
        out += ds.names[static_cast<std::size_t>(i)];
    }
    out += '\n';
    for (int t = 0; t < ds.t_len; ++t) {
        for (int i = 0; i < ds.n_vars; ++i) {
            if (i > 0) out += ',';
            out += ds.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace varlag
