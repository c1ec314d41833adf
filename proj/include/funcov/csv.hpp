#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "funcov/errors.hpp"
#include "funcov/global_test.hpp"
#include "funcov/grid.hpp"
#include "funcov/sample.hpp"

// CSV formats (UTF-8, comma separated, '.' decimal):
//   two-sample wide:  id,group[,pair_id],t0,t1,...   one row per curve
//   trial long-wide:  trial,neuron,t0,t1,...         one row per (trial, neuron)
// Doubles are written in shortest round-trip form so that
// serialise -> parse is the identity.

namespace funcov::csv {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

inline double parse_double(const std::string& field, const std::string& path,
                           std::size_t line_no, std::size_t column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw input_error(path + ":" + std::to_string(line_no) + ": column " +
                          std::to_string(column + 1) + ": not a number: '" + field + "'");
    return value;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline bool blank(const std::string& line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

} // namespace detail

/// Parse a grid file: T whitespace- or newline-separated timepoints.
inline Grid parse_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::vector<double> points;
    std::string token;
    while (in >> token) {
        double value = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
        if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
            throw input_error(path + ": not a number: '" + token + "'");
        points.push_back(value);
    }
    if (points.size() < 2) throw input_error(path + ": grid needs at least 2 points");
    return Grid(std::move(points)); // rejects non-uniform spacing
}

struct TwoSampleData {
    FunctionalSample group1;
    FunctionalSample group2;
};

/// Parse one or more wide-format two-sample CSV files. Rows from all
/// files are concatenated; group membership comes from the `group`
/// column. The grid is inferred as equally spaced on [0, 1] unless an
/// explicit grid is supplied.
inline TwoSampleData parse_two_sample_csv(const std::vector<std::string>& paths,
                                          const std::optional<Grid>& grid_override = {}) {
    if (paths.empty()) throw input_error("no input files given");

    std::size_t n_time = 0;
    bool has_pair = false;
    std::vector<std::vector<double>> rows[2];
    std::vector<std::string> pair_ids[2];
    std::set<std::pair<int, std::string>> seen_pairs;

    for (std::size_t f = 0; f < paths.size(); ++f) {
        const auto lines = detail::read_lines(paths[f]);
        if (lines.empty()) throw input_error(paths[f] + ": empty file");
        const auto header = detail::split_line(lines[0]);
        if (header.size() < 3 || header[0] != "id" || header[1] != "group")
            throw input_error(paths[f] + ":1: header must start 'id,group[,pair_id],t0,...'");
        const bool file_pair = header.size() > 2 && header[2] == "pair_id";
        const std::size_t value_offset = file_pair ? 3 : 2;
        const std::size_t file_time = header.size() - value_offset;
        if (file_time < 2)
            throw input_error(paths[f] + ":1: need at least 2 timepoint columns");
        if (f == 0) {
            n_time = file_time;
            has_pair = file_pair;
        } else if (file_time != n_time || file_pair != has_pair) {
            throw input_error(paths[f] + ":1: header does not match the first file");
        }

        for (std::size_t l = 1; l < lines.size(); ++l) {
            if (detail::blank(lines[l])) continue;
            const auto fields = detail::split_line(lines[l]);
            const std::string where = paths[f] + ":" + std::to_string(l + 1);
            if (fields.size() != header.size())
                throw input_error(where + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
            int group = 0;
            if (fields[1] == "1")
                group = 1;
            else if (fields[1] == "2")
                group = 2;
            else
                throw input_error(where + ": group must be 1 or 2, got '" + fields[1] + "'");

            std::vector<double> values(n_time);
            for (std::size_t j = 0; j < n_time; ++j)
                values[j] = detail::parse_double(fields[value_offset + j], paths[f], l + 1,
                                                 value_offset + j);
            rows[group - 1].push_back(std::move(values));
            if (has_pair) {
                if (!seen_pairs.emplace(group, fields[2]).second)
                    throw input_error(where + ": duplicate pair_id '" + fields[2] +
                                      "' in group " + fields[1]);
                pair_ids[group - 1].push_back(fields[2]);
            }
        }
    }

    Grid grid = grid_override ? *grid_override : Grid::regular(n_time);
    if (grid.size() != n_time)
        throw input_error("grid file has " + std::to_string(grid.size()) +
                          " points but data has " + std::to_string(n_time));
    for (int g : {0, 1})
        if (rows[g].empty())
            throw input_error("group " + std::to_string(g + 1) + " has no curves");

    auto build = [&](int g) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows[g].size()),
                          static_cast<Eigen::Index>(n_time));
        for (std::size_t i = 0; i < rows[g].size(); ++i)
            for (std::size_t j = 0; j < n_time; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[g][i][j];
        FunctionalSample s(std::move(m), grid);
        s.pair = pair_ids[g];
        return s;
    };
    return {build(0), build(1)};
}

/// Write two groups in the wide two-sample format. Pair ids are emitted
/// when both groups carry them.
inline void write_two_sample_csv(std::ostream& out, const FunctionalSample& group1,
                                 const FunctionalSample& group2) {
    const bool pairs = group1.has_pairs() && group2.has_pairs();
    out << "id,group";
    if (pairs) out << ",pair_id";
    for (Eigen::Index j = 0; j < group1.n_points(); ++j) out << ",t" << j;
    out << "\n";
    std::size_t id = 0;
    for (int g = 1; g <= 2; ++g) {
        const FunctionalSample& s = (g == 1) ? group1 : group2;
        for (Eigen::Index i = 0; i < s.n_curves(); ++i, ++id) {
            out << id << ',' << g;
            if (pairs) out << ',' << s.pair[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < s.n_points(); ++j)
                out << ',' << format_double(s.values(i, j));
            out << "\n";
        }
    }
}

/// Parse the long-wide trial format. Every (trial, neuron) combination
/// must appear exactly once; orders follow first appearance.
inline TrialDataset parse_trial_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw input_error(path + ": empty file");
    const auto header = detail::split_line(lines[0]);
    if (header.size() < 4 || header[0] != "trial" || header[1] != "neuron")
        throw input_error(path + ":1: header must start 'trial,neuron,t0,...'");
    const std::size_t n_time = header.size() - 2;

    std::vector<std::string> trial_ids, neuron_ids;
    std::unordered_map<std::string, std::size_t> trial_index, neuron_index;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;

    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (detail::blank(lines[l])) continue;
        const auto fields = detail::split_line(lines[l]);
        const std::string where = path + ":" + std::to_string(l + 1);
        if (fields.size() != header.size())
            throw input_error(where + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        auto intern = [](const std::string& id, std::vector<std::string>& ids,
                         std::unordered_map<std::string, std::size_t>& index) {
            const auto it = index.find(id);
            if (it != index.end()) return it->second;
            ids.push_back(id);
            index.emplace(id, ids.size() - 1);
            return ids.size() - 1;
        };
        const std::size_t t = intern(fields[0], trial_ids, trial_index);
        const std::size_t r = intern(fields[1], neuron_ids, neuron_index);
        std::vector<double> values(n_time);
        for (std::size_t j = 0; j < n_time; ++j)
            values[j] = detail::parse_double(fields[2 + j], path, l + 1, 2 + j);
        if (!cells.emplace(std::make_pair(t, r), std::move(values)).second)
            throw input_error(where + ": duplicate (trial, neuron) = ('" + fields[0] +
                              "', '" + fields[1] + "')");
    }

    std::vector<std::string> gaps;
    for (std::size_t t = 0; t < trial_ids.size() && gaps.size() < 10; ++t)
        for (std::size_t r = 0; r < neuron_ids.size() && gaps.size() < 10; ++r)
            if (!cells.count({t, r}))
                gaps.push_back("('" + trial_ids[t] + "', '" + neuron_ids[r] + "')");
    if (!gaps.empty()) {
        std::string msg = path + ": missing (trial, neuron) combinations:";
        for (const auto& g : gaps) msg += " " + g;
        throw input_error(msg);
    }

    std::vector<Eigen::MatrixXd> curves(trial_ids.size());
    for (std::size_t t = 0; t < trial_ids.size(); ++t) {
        curves[t].resize(static_cast<Eigen::Index>(neuron_ids.size()),
                         static_cast<Eigen::Index>(n_time));
        for (std::size_t r = 0; r < neuron_ids.size(); ++r) {
            const auto& values = cells.at({t, r});
            for (std::size_t j = 0; j < n_time; ++j)
                curves[t](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
                    values[j];
        }
    }
    return TrialDataset(std::move(trial_ids), std::move(neuron_ids), std::move(curves),
                        Grid::regular(n_time));
}

/// Write a trial dataset in the long-wide format.
inline void write_trial_csv(std::ostream& out, const TrialDataset& ds) {
    out << "trial,neuron";
    for (std::size_t j = 0; j < ds.grid.size(); ++j) out << ",t" << j;
    out << "\n";
    for (std::size_t t = 0; t < ds.n_trials(); ++t)
        for (std::size_t r = 0; r < ds.n_neurons(); ++r) {
            out << ds.trial_ids[t] << ',' << ds.neuron_ids[r];
            for (std::size_t j = 0; j < ds.grid.size(); ++j)
                out << ','
                    << format_double(ds.curves[t](static_cast<Eigen::Index>(r),
                                                  static_cast<Eigen::Index>(j)));
            out << "\n";
        }
}

} // namespace funcov::csv
