#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace varlag {

enum class VariableKind { Continuous, Binary };

const char* to_string(VariableKind kind);

// Multivariate time series: N named variables observed over T time points.
// values[i][t] holds variable i at time t (0-based internally; the design
// matrix API reports 1-based time indices to match the usual convention).
struct TimeSeriesDataset {
    std::vector<std::string> names;
    std::vector<VariableKind> kinds;
    std::vector<std::vector<double>> values;   // N x T
    std::vector<std::vector<bool>> missing;    // N x T
    int n_vars = 0;
    int t_len = 0;

    bool complete() const;
    void validate() const;  // throws std::invalid_argument on structural violations
};

// Per-child regression inputs for a lagged parent set. Row r corresponds to
// time start + r (1-based); the first column is the intercept.
struct DesignMatrix {
    int child = -1;
    Eigen::MatrixXd rows;      // n x p
    Eigen::VectorXd response;  // n
    int n = 0;                 // effective sample size: t_len - max parent lag
    int p = 0;                 // 1 + number of parent edges
    int start = 1;             // first usable time index (1-based): 1 + max lag
};

TimeSeriesDataset load_csv(const std::string& path,
                           const std::map<std::string, VariableKind>& kind_overrides = {});

// Mean-fills continuous columns, mode-fills binary columns (ties resolve to 0).
// Throws std::runtime_error if a column has no observed value.
TimeSeriesDataset impute(const TimeSeriesDataset& ds);

// Returns nullopt when the candidate is inadmissible: too few usable rows
// (t_len - max lag < 1) or n < p. Throws on out-of-range indices or lag < 1.
std::optional<DesignMatrix> build_design(const TimeSeriesDataset& ds, int child,
                                         const std::vector<std::pair<int, int>>& parents);

}  // namespace varlag
