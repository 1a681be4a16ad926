#include "varlag/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace varlag {

const char* to_string(VariableKind kind) {
    return kind == VariableKind::Binary ? "binary" : "continuous";
}

bool TimeSeriesDataset::complete() const {
    for (const auto& col : missing) {
        for (bool m : col) {
            if (m) return false;
        }
    }
    return true;
}

void TimeSeriesDataset::validate() const {
    if (n_vars < 1) throw std::invalid_argument("dataset needs at least one variable");
    if (t_len < 2) throw std::invalid_argument("dataset needs at least two time points");
    if (static_cast<int>(names.size()) != n_vars || static_cast<int>(kinds.size()) != n_vars ||
        static_cast<int>(values.size()) != n_vars || static_cast<int>(missing.size()) != n_vars) {
        throw std::invalid_argument("dataset field lengths disagree with n_vars");
    }
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) {
            throw std::invalid_argument("duplicate variable name: " + name);
        }
    }
    for (int i = 0; i < n_vars; ++i) {
        if (static_cast<int>(values[i].size()) != t_len ||
            static_cast<int>(missing[i].size()) != t_len) {
            throw std::invalid_argument("series length disagrees with t_len");
        }
        for (int t = 0; t < t_len; ++t) {
            if (!missing[i][t] && !std::isfinite(values[i][t])) {
                throw std::invalid_argument("non-finite observed value in " + names[i]);
            }
        }
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_missing_token(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) return true;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s == "na" || s == "nan";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& raw, int row, const std::string& col) {
    const std::string s = trim(raw);
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::runtime_error("non-numeric cell '" + s + "' at row " + std::to_string(row) +
                                 ", column " + col);
    }
    return value;
}

}  // namespace

TimeSeriesDataset load_csv(const std::string& path,
                           const std::map<std::string, VariableKind>& kind_overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    TimeSeriesDataset ds;
    for (const auto& raw : split_csv_line(line)) {
        const std::string name = trim(raw);
        if (name.empty()) throw std::runtime_error("empty header name in " + path);
        ds.names.push_back(name);
    }
    ds.n_vars = static_cast<int>(ds.names.size());
    {
        std::set<std::string> seen;
        for (const auto& name : ds.names) {
            if (!seen.insert(name).second) {
                throw std::runtime_error("duplicate header name: " + name);
            }
        }
    }
    for (const auto& [name, kind] : kind_overrides) {
        (void)kind;
        if (std::find(ds.names.begin(), ds.names.end(), name) == ds.names.end()) {
            throw std::runtime_error("kind override names unknown column: " + name);
        }
    }

    ds.values.assign(ds.n_vars, {});
    ds.missing.assign(ds.n_vars, {});
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != ds.n_vars) {
            throw std::runtime_error("row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ds.n_vars));
        }
        for (int i = 0; i < ds.n_vars; ++i) {
            if (is_missing_token(cells[i])) {
                ds.values[i].push_back(0.0);
                ds.missing[i].push_back(true);
            } else {
                ds.values[i].push_back(parse_cell(cells[i], row, ds.names[i]));
                ds.missing[i].push_back(false);
            }
        }
    }
    ds.t_len = row;
    if (ds.t_len < 2) throw std::runtime_error("fewer than 2 data rows in " + path);

    ds.kinds.resize(ds.n_vars);
    for (int i = 0; i < ds.n_vars; ++i) {
        bool binary = true;
        for (int t = 0; t < ds.t_len; ++t) {
            if (ds.missing[i][t]) continue;
            if (ds.values[i][t] != 0.0 && ds.values[i][t] != 1.0) {
                binary = false;
                break;
            }
        }
        auto it = kind_overrides.find(ds.names[i]);
        if (it != kind_overrides.end()) {
            if (it->second == VariableKind::Binary && !binary) {
                throw std::runtime_error("column " + ds.names[i] +
                                         " has values outside {0,1}; cannot override as binary");
            }
            ds.kinds[i] = it->second;
        } else {
            ds.kinds[i] = binary ? VariableKind::Binary : VariableKind::Continuous;
        }
    }
    ds.validate();
    return ds;
}

TimeSeriesDataset impute(const TimeSeriesDataset& ds) {
    TimeSeriesDataset out = ds;
    for (int i = 0; i < ds.n_vars; ++i) {
        double sum = 0.0;
        int observed = 0;
        int ones = 0;
        for (int t = 0; t < ds.t_len; ++t) {
            if (ds.missing[i][t]) continue;
            ++observed;
            sum += ds.values[i][t];
            if (ds.values[i][t] == 1.0) ++ones;
        }
        if (observed == 0) {
            throw std::runtime_error("cannot impute fully missing column " + ds.names[i]);
        }
        double fill;
        if (ds.kinds[i] == VariableKind::Binary) {
            const int zeros = observed - ones;
            fill = ones > zeros ? 1.0 : 0.0;  // ties resolve to 0
        } else {
            fill = sum / static_cast<double>(observed);
        }
        for (int t = 0; t < ds.t_len; ++t) {
            if (out.missing[i][t]) {
                out.values[i][t] = fill;
                out.missing[i][t] = false;
            }
        }
    }
    return out;
}

std::optional<DesignMatrix> build_design(const TimeSeriesDataset& ds, int child,
                                         const std::vector<std::pair<int, int>>& parents) {
    if (child < 0 || child >= ds.n_vars) throw std::invalid_argument("child index out of range");
    int max_lag = 0;  // empty parent set keeps every row
    for (const auto& [idx, lag] : parents) {
        if (idx < 0 || idx >= ds.n_vars) throw std::invalid_argument("parent index out of range");
        if (lag < 1) throw std::invalid_argument("parent lag must be >= 1");
        max_lag = std::max(max_lag, lag);
    }
    const int n = ds.t_len - max_lag;
    const int p = 1 + static_cast<int>(parents.size());
    if (n < 1 || n < p) return std::nullopt;
    if (max_lag >= ds.t_len) return std::nullopt;

    DesignMatrix dm;
    dm.child = child;
    dm.n = n;
    dm.p = p;
    dm.start = 1 + max_lag;
    dm.rows.resize(n, p);
    dm.response.resize(n);
    for (int r = 0; r < n; ++r) {
        const int t = max_lag + r;  // 0-based time of the response row
        dm.rows(r, 0) = 1.0;
        for (std::size_t k = 0; k < parents.size(); ++k) {
            dm.rows(r, static_cast<int>(k) + 1) = ds.values[parents[k].first][t - parents[k].second];
        }
        dm.response(r) = ds.values[child][t];
    }
    return dm;
}

}  // namespace varlag
