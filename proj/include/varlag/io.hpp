#pragma once

#include "varlag/dataset.hpp"
#include "varlag/graph.hpp"
#include "varlag/metrics.hpp"
#include "varlag/score.hpp"
#include "varlag/search.hpp"
#include "varlag/synth.hpp"

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace varlag {

// Shortest round-trip decimal form (to_chars); integral values print bare.
std::string format_double(double v);

nlohmann::json graph_to_json(const LaggedGraph& g, const std::vector<std::string>& names);
// Accepts either the plain graph object or a wrapper with a "graph" key
// (the truth.json layout).
struct NamedGraph {
    LaggedGraph graph;
    std::vector<std::string> names;
};
NamedGraph graph_from_json(const nlohmann::json& j);

// Flat edge list "parent,child,lag" with variable names, sorted by index.
std::string edges_to_csv(const LaggedGraph& g, const std::vector<std::string>& names);
LaggedGraph edges_from_csv(const std::string& csv, const std::vector<std::string>& names);

std::string trace_to_jsonl(const SearchTrace& trace);

nlohmann::json report_to_json(const StructuralReport& r);
std::string report_csv_header();
std::string report_to_csv_row(const StructuralReport& r);

nlohmann::json truth_to_json(const GroundTruth& truth, const std::vector<std::string>& names);
GroundTruth truth_from_json(const nlohmann::json& j);

// Score report: totals in the 2*logL - p*log(n) convention plus per-node
// cards and the lag histogram of the learnt graph.
nlohmann::json score_report_to_json(const LaggedGraph& g, const std::vector<std::string>& names,
                                    double total_score, const std::vector<NodeScoreCard>& cards);

std::string dataset_to_csv(const TimeSeriesDataset& ds);  // masked cells are empty
std::string mask_to_csv(const TimeSeriesDataset& ds);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace varlag
