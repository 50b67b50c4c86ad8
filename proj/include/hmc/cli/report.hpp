// CSV report tables with a `# resolved_config` comment header.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hmc/csv.hpp"

namespace hmc::cli {

/// Empty optionals become empty cells; NaN is written as an empty cell too.
using Cell = std::variant<std::optional<double>, std::string, long long>;

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns_.size())
            throw DimensionError("columns", "report row has " + std::to_string(row.size()) + " cells, expected " +
                                                std::to_string(columns_.size()));
        rows_.push_back(std::move(row));
    }

    void set_header(std::vector<std::string> lines) { header_ = std::move(lines); }

    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    void write(std::ostream& os, int precision) const {
        if (!header_.empty()) {
            os << "# resolved_config\n";
            for (const auto& line : header_) os << "# " << line << '\n';
        }
        for (std::size_t j = 0; j < columns_.size(); ++j) os << (j ? "," : "") << columns_[j];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) os << ',';
                std::visit(
                    [&](const auto& v) {
                        using V = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<V, std::string>) {
                            os << v;
                        } else if constexpr (std::is_same_v<V, long long>) {
                            os << v;
                        } else if (v && std::isfinite(*v)) {
                            os << csv::format_number(*v, precision);
                        }
                    },
                    row[j]);
            }
            os << '\n';
        }
    }

    void write(const std::filesystem::path& file, int precision) const {
        auto os = csv::open_output(file);
        write(os, precision);
        os.flush();
        if (!os) throw IoError("failed writing " + file.string());
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

[[nodiscard]] inline Cell num(double v) { return std::optional<double>(v); }
[[nodiscard]] inline Cell num(std::optional<double> v) { return v; }
[[nodiscard]] inline Cell integer(long long v) { return v; }
[[nodiscard]] inline Cell blank() { return std::optional<double>{}; }

/// Column name for a quantile level: 0.05 -> q05, 0.5 -> q50, 0.025 -> q2.5.
[[nodiscard]] inline std::string quantile_column(double p, const std::string& suffix = "") {
    const double pct = p * 100.0;
    char buf[32];
    if (std::abs(pct - std::round(pct)) < 1e-9)
        std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(std::round(pct)));
    else
        std::snprintf(buf, sizeof buf, "q%g", pct);
    return buf + suffix;
}

}  // namespace hmc::cli
