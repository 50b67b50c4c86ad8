// Historical price files (`date,price`, ISO-8601 dates, one file per asset)
// and their alignment on common dates.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"
#include "hmc/csv.hpp"

namespace hmc::scenarios {

struct PriceSeries {
    std::string name;
    std::vector<std::string> dates;  // ascending
    std::vector<double> prices;
};

struct AlignedPrices {
    std::vector<std::string> names;
    std::vector<std::string> dates;
    Eigen::MatrixXd prices;  // dates x assets
    std::size_t dropped_rows = 0;

    /// log(P_{t+1} / P_t), (dates-1) x assets.
    [[nodiscard]] Eigen::MatrixXd log_returns() const {
        const Eigen::Index n = prices.rows();
        if (n < 2) throw DimensionError("dates", "log_returns: need at least two dates");
        return (prices.bottomRows(n - 1).array() / prices.topRows(n - 1).array()).log().matrix();
    }
};

[[nodiscard]] inline bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    const int y = std::stoi(std::string(s.substr(0, 4)));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(s.substr(5, 2))));
    const unsigned d = static_cast<unsigned>(std::stoi(std::string(s.substr(8, 2))));
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

[[nodiscard]] inline PriceSeries read_price_series(std::istream& is, std::string name) {
    PriceSeries out;
    out.name = std::move(name);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ParseError(1, out.name + ": empty price file");
    ++line_no;
    auto header = csv::split(csv::trim(line));
    if (header.size() != 2 || csv::trim(header[0]) != "date" || csv::trim(header[1]) != "price")
        throw ParseError(1, out.name + ": line 1: expected header 'date,price'");
    std::map<std::string, double> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto cells = csv::split(csv::trim(line));
        const std::string where = out.name + ": line " + std::to_string(line_no);
        if (cells.size() != 2) throw ParseError(line_no, where + ": expected 2 cells");
        const std::string date(csv::trim(cells[0]));
        if (!is_iso_date(date)) throw ParseError(line_no, where + ": bad date '" + date + "'");
        const auto price = csv::parse_double(cells[1]);
        if (!price || !std::isfinite(*price)) throw ParseError(line_no, where + ": non-numeric price");
        if (!(*price > 0.0)) throw ParseError(line_no, where + ": price must be > 0");
        if (!rows.emplace(date, *price).second) throw ParseError(line_no, where + ": duplicate date " + date);
    }
    if (rows.empty()) throw ParseError(line_no, out.name + ": no data rows");
    for (const auto& [d, p] : rows) {
        out.dates.push_back(d);
        out.prices.push_back(p);
    }
    return out;
}

[[nodiscard]] inline PriceSeries read_price_series(const std::filesystem::path& file) {
    auto is = csv::open_input(file);
    return read_price_series(is, file.filename().string());
}

/// Inner join on dates. dropped_rows counts dates present in some but not
/// all series.
[[nodiscard]] inline AlignedPrices align_series(const std::vector<PriceSeries>& series) {
    if (series.empty()) throw DimensionError("assets", "align_series: no series");
    std::set<std::string> all, common(series[0].dates.begin(), series[0].dates.end());
    for (const auto& s : series) {
        all.insert(s.dates.begin(), s.dates.end());
        std::set<std::string> keep;
        for (const auto& d : s.dates)
            if (common.count(d)) keep.insert(d);
        common = std::move(keep);
    }
    if (common.empty()) throw Error("align_series: the series share no dates");
    AlignedPrices out;
    out.dates.assign(common.begin(), common.end());
    out.dropped_rows = all.size() - common.size();
    out.prices.resize(static_cast<Eigen::Index>(out.dates.size()), static_cast<Eigen::Index>(series.size()));
    for (std::size_t k = 0; k < series.size(); ++k) {
        out.names.push_back(series[k].name);
        std::size_t row = 0;
        for (std::size_t j = 0; j < series[k].dates.size(); ++j)
            if (common.count(series[k].dates[j]))
                out.prices(static_cast<Eigen::Index>(row++), static_cast<Eigen::Index>(k)) = series[k].prices[j];
    }
    return out;
}

[[nodiscard]] inline AlignedPrices ingest_prices(const std::vector<std::filesystem::path>& files) {
    std::vector<PriceSeries> series;
    for (const auto& f : files) series.push_back(read_price_series(f));
    return align_series(series);
}

}  // namespace hmc::scenarios
