// Text I/O for PathSet and CashFlowSet.
//
//   PathSet:     path,t,asset_1,...,asset_d   (one row per path and time)
//   CashFlowSet: path,t,cashflow
//
// Times are integer step indices; numbers use '.' as decimal separator.
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmc/core.hpp"

namespace hmc::csv {

/// precision 0 gives the shortest text that reads back to the same double;
/// otherwise %.<precision>g.
inline std::string format_number(double x, int precision = 0) {
    char buf[64];
    if (precision <= 0) {
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long> parse_int(std::string_view s) {
    s = trim(s);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// ----------------------------------------------------------------------------

inline void write_paths(std::ostream& os, const PathSet& paths, int precision = 0) {
    os << "path,t";
    for (std::size_t k = 0; k < paths.n_assets(); ++k) os << ",asset_" << (k + 1);
    os << '\n';
    const int t0 = paths.grid().t0();
    for (std::size_t i = 0; i < paths.n_paths(); ++i)
        for (std::size_t t = 0; t < paths.n_times(); ++t) {
            os << i << ',' << (t0 + static_cast<int>(t));
            for (std::size_t k = 0; k < paths.n_assets(); ++k)
                os << ',' << format_number(paths(i, t, k), precision);
            os << '\n';
        }
}

inline void write_flows(std::ostream& os, const CashFlowSet& flows, int precision = 0) {
    os << "path,t,cashflow\n";
    const int t0 = flows.grid().t0();
    for (std::size_t i = 0; i < flows.n_paths(); ++i)
        for (std::size_t t = 0; t < flows.n_times(); ++t)
            os << i << ',' << (t0 + static_cast<int>(t)) << ',' << format_number(flows(i, t), precision)
               << '\n';
}

namespace detail {

struct Table {
    std::size_t n_value_cols = 0;
    long min_path = std::numeric_limits<long>::max(), max_path = -1;
    long min_t = std::numeric_limits<long>::max(), max_t = std::numeric_limits<long>::min();
    std::map<std::pair<long, long>, std::vector<double>> rows;
};

inline Table read_table(std::istream& is, std::string_view what) {
    Table tab;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ParseError(1, std::string(what) + ": empty input");
    ++line_no;
    auto header = split(trim(line));
    if (header.size() < 3 || trim(header[0]) != "path" || trim(header[1]) != "t")
        throw ParseError(line_no, std::string(what) + ": bad header, expected 'path,t,...'");
    tab.n_value_cols = header.size() - 2;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(trim(line));
        if (cells.size() != header.size())
            throw ParseError(line_no, std::string(what) + ": line " + std::to_string(line_no) +
                                          " has " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(header.size()));
        auto p = parse_int(cells[0]);
        auto t = parse_int(cells[1]);
        if (!p || !t || *p < 0)
            throw ParseError(line_no, std::string(what) + ": bad index on line " + std::to_string(line_no));
        std::vector<double> vals;
        vals.reserve(tab.n_value_cols);
        for (std::size_t c = 2; c < cells.size(); ++c) {
            auto v = parse_double(cells[c]);
            if (!v)
                throw ParseError(line_no, std::string(what) + ": non-numeric value on line " +
                                              std::to_string(line_no));
            vals.push_back(*v);
        }
        if (!tab.rows.emplace(std::pair{*p, *t}, std::move(vals)).second)
            throw ParseError(line_no, std::string(what) + ": duplicate (path, t) on line " +
                                          std::to_string(line_no));
        tab.min_path = std::min(tab.min_path, *p);
        tab.max_path = std::max(tab.max_path, *p);
        tab.min_t = std::min(tab.min_t, *t);
        tab.max_t = std::max(tab.max_t, *t);
    }
    if (tab.rows.empty()) throw ParseError(line_no, std::string(what) + ": no data rows");
    const auto n_paths = static_cast<std::size_t>(tab.max_path + 1);
    const auto n_times = static_cast<std::size_t>(tab.max_t - tab.min_t + 1);
    if (tab.min_path != 0 || tab.rows.size() != n_paths * n_times)
        throw ParseError(line_no, std::string(what) + ": rows do not cover every (path, t) pair");
    if (n_times < 2) throw ParseError(line_no, std::string(what) + ": need at least two time points");
    return tab;
}

}  // namespace detail

/// Reads a PathSet; dt and r are not part of the file and must be supplied.
inline PathSet read_paths(std::istream& is, double dt, double r) {
    auto tab = detail::read_table(is, "PathSet CSV");
    const auto n_paths = static_cast<std::size_t>(tab.max_path + 1);
    TimeGrid grid(static_cast<int>(tab.min_t), static_cast<int>(tab.max_t - tab.min_t), dt, r);
    PathSet out(n_paths, tab.n_value_cols, grid);
    for (const auto& [key, vals] : tab.rows) {
        auto t = static_cast<std::size_t>(key.second - tab.min_t);
        for (std::size_t k = 0; k < vals.size(); ++k) out(static_cast<std::size_t>(key.first), t, k) = vals[k];
    }
    return out;
}

inline CashFlowSet read_flows(std::istream& is, double dt, double r) {
    auto tab = detail::read_table(is, "CashFlowSet CSV");
    if (tab.n_value_cols != 1) throw ParseError(1, "CashFlowSet CSV: expected header 'path,t,cashflow'");
    const auto n_paths = static_cast<std::size_t>(tab.max_path + 1);
    TimeGrid grid(static_cast<int>(tab.min_t), static_cast<int>(tab.max_t - tab.min_t), dt, r);
    CashFlowSet out(n_paths, grid);
    for (const auto& [key, vals] : tab.rows)
        out(static_cast<std::size_t>(key.first), static_cast<std::size_t>(key.second - tab.min_t)) = vals[0];
    return out;
}

inline std::ifstream open_input(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open '" + file.string() + "' for reading");
    return is;
}

inline std::ofstream open_output(const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw IoError("cannot open '" + file.string() + "' for writing");
    return os;
}

}  // namespace hmc::csv
