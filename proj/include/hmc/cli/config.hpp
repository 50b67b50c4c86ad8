// Run configuration for the command-line front end: a JSON document with
// sections scenario, grid, claim, oracle, basis, engine, output and validate.
// Unknown keys and wrong types are rejected with the dotted key path.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmc/core.hpp"

namespace hmc::cli {

using json = nlohmann::json;

/// Invalid configuration; `section()` is the dotted path of the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string section, const std::string& what)
        : Error(section + ": " + what), section_(std::move(section)) {}
    [[nodiscard]] const std::string& section() const noexcept { return section_; }

private:
    std::string section_;
};

// ---------------------------------------------------------------- loading

[[nodiscard]] inline json load_json(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open config file " + file.string());
    std::stringstream buf;
    buf << is.rdbuf();
    try {
        json doc = json::parse(buf.str());
        if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
        return doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
}

/// Applies `key.path=value`. The value is read as JSON when it parses,
/// otherwise as a plain string. Numeric segments index into arrays.
inline void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string seg = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (seg.empty()) throw ConfigError(key, "empty key segment in override");
        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(seg);
            } catch (const std::exception&) {
                throw ConfigError(key, "array element needs a numeric index");
            }
            if (idx >= node->size()) throw ConfigError(key, "array index out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError(key, "cannot descend into a scalar");
            node = &(*node)[seg];
        }
        if (last) break;
        pos = dot + 1;
    }
    *node = std::move(value);
}

// ---------------------------------------------------------------- reading

/// View on one JSON object that records which keys were read.
class Section {
public:
    Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_->is_null() && !node_->is_object()) throw ConfigError(path_, "expected an object");
        if (node_ && node_->is_null()) node_ = nullptr;
    }

    [[nodiscard]] std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[nodiscard]] bool has(const std::string& key) {
        seen_.insert(key);
        return node_ && node_->contains(key) && !(*node_)[key].is_null();
    }

    [[nodiscard]] const json* raw(const std::string& key) {
        return has(key) ? &(*node_)[key] : nullptr;
    }

    [[nodiscard]] Section sub(const std::string& key) { return Section(raw(key), key_path(key)); }

    template <class T>
    [[nodiscard]] T get(const std::string& key, T fallback) {
        const json* v = raw(key);
        return v ? convert<T>(*v, key_path(key)) : fallback;
    }

    template <class T>
    [[nodiscard]] std::optional<T> optional(const std::string& key) {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        return convert<T>(*v, key_path(key));
    }

    template <class T>
    [[nodiscard]] T require(const std::string& key) {
        const json* v = raw(key);
        if (!v) throw ConfigError(key_path(key), "missing required value");
        return convert<T>(*v, key_path(key));
    }

    /// Rejects keys that were never read.
    void finish() const {
        if (!node_) return;
        for (const auto& [k, v] : node_->items())
            if (!seen_.count(k)) throw ConfigError(key_path(k), "unknown key");
    }

    template <class T>
    static T convert(const json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
            const auto x = v.get<long long>();
            if constexpr (std::is_unsigned_v<T>)
                if (x < 0) throw ConfigError(where, "expected a non-negative integer");
            return static_cast<T>(x);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where, "expected a number");
            return v.get<T>();
        } else {
            if (!v.is_array()) throw ConfigError(where, "expected an array");
            T out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
            return out;
        }
    }

private:
    const json* node_;
    std::string path_;
    std::set<std::string> seen_;
};

// ---------------------------------------------------------------- schema

enum class Command { price_european, price_exchange, price_real_option, simulate, calibrate_garch, validate };

[[nodiscard]] inline std::optional<Command> parse_command(std::string_view s) {
    if (s == "price-european") return Command::price_european;
    if (s == "price-exchange") return Command::price_exchange;
    if (s == "price-real-option" || s == "real-option") return Command::price_real_option;
    if (s == "simulate") return Command::simulate;
    if (s == "calibrate-garch") return Command::calibrate_garch;
    if (s == "validate") return Command::validate;
    return std::nullopt;
}

[[nodiscard]] inline std::string command_name(Command c) {
    switch (c) {
        case Command::price_european: return "price-european";
        case Command::price_exchange: return "price-exchange";
        case Command::price_real_option: return "price-real-option";
        case Command::simulate: return "simulate";
        case Command::calibrate_garch: return "calibrate-garch";
        case Command::validate: return "validate";
    }
    return "?";
}

struct GridConfig {
    int steps = 65;
    double horizon = 0.25;  // years
    double rate = 0.05;     // continuously compounded, annual
};

struct GbmConfig {
    std::vector<double> drift{0.0};
    std::vector<double> volatility{0.3};
    std::vector<std::vector<double>> correlation;  // empty = independent
    std::vector<double> initial{100.0};
};

struct GarchPcaConfig {
    std::vector<std::string> sources;  // date,price CSV files
    int substeps = 21;                 // GARCH periods per grid step
    std::vector<double> initial;       // empty = last observed prices
    int max_iterations = 2000;
    int restarts = 3;
};

struct ScenarioConfig {
    std::string model = "gbm";  // gbm | garch_pca | csv
    GbmConfig gbm;
    GarchPcaConfig garch_pca;
    std::string csv_file;
};

struct ClaimConfig {
    std::string kind;  // call | exchange | real_option; defaults from the command
    double strike = 100.0;
    int asset = 0;
    std::vector<std::vector<double>> spots;  // sweep of initial prices
    int window_first = 0;
    std::optional<int> window_last;
    std::optional<int> valuation_step;
};

struct OracleConfig {
    std::string kind = "clipped_spread";  // clipped_spread | external_csv
    double a = 1.2895e-4;
    double b_coef = -5.3191e-5;
    double running_cost = 0.05;
    double noise_std = 0.005;
    std::uint64_t noise_seed = 2;
    std::string file;
};

struct BasisConfig {
    std::string family = "monomial";
    int degree = 2;
    bool tensor = true;
    json scaling = "auto";  // "auto", "none" or one positive number per asset
};

struct EngineConfig {
    std::uint64_t seed = 7;
    std::size_t paths = 5000;
    bool hedge = true;
    double rank_tolerance = 1e-10;
};

struct OutputConfig {
    std::string dir = "out";
    bool fan = true;
    bool scatter = true;
    std::vector<double> quantiles{0.05, 0.5, 0.95};
    int precision = 0;  // 0 = shortest round-trip
    bool paths = true;   // simulate: write paths.csv
    bool flows = false;  // simulate: write flows.csv through the oracle
    std::optional<int> scatter_step;
};

struct ValidateConfig {
    double price_tolerance = 0.25;
    double se_multiple = 3.0;
    double delta_tolerance = 0.05;
    std::vector<double> spots{80, 90, 100, 110, 120};
    double strike = 100.0;
    double volatility = 0.3;
    double rate = 0.05;
    double horizon = 0.25;
    int steps = 65;
    std::size_t paths = 5000;
    std::vector<double> exchange_volatility{0.3, 0.2};
    std::vector<double> exchange_spots{100, 100};
    double exchange_horizon = 65.0 / 252.0;
    std::size_t exchange_paths = 10000;
};

struct RunConfig {
    Command command = Command::price_european;
    std::filesystem::path base_dir;  // relative file references resolve here
    ScenarioConfig scenario;
    GridConfig grid;
    ClaimConfig claim;
    OracleConfig oracle;
    BasisConfig basis;
    EngineConfig engine;
    OutputConfig output;
    ValidateConfig validate;

    [[nodiscard]] std::filesystem::path resolve(const std::string& file) const {
        const std::filesystem::path p(file);
        return p.is_absolute() ? p : base_dir / p;
    }
};

namespace detail {

inline void check(bool ok, const std::string& where, const std::string& what) {
    if (!ok) throw ConfigError(where, what);
}

inline void check_quantiles(const std::vector<double>& q, const std::string& where) {
    check(!q.empty(), where, "needs at least one level");
    for (double p : q) check(p >= 0.0 && p <= 1.0, where, "quantile levels must lie in [0, 1]");
}

}  // namespace detail

/// Reads every section, filling defaults, and validates enumerations and
/// ranges. File references are resolved against `base_dir`.
[[nodiscard]] inline RunConfig parse_config(const json& doc, Command command, std::filesystem::path base_dir) {
    using detail::check;
    RunConfig cfg;
    cfg.command = command;
    cfg.base_dir = std::move(base_dir);
    Section root(&doc, "");

    {
        Section s = root.sub("grid");
        auto& g = cfg.grid;
        g.steps = s.get("steps", g.steps);
        g.horizon = s.get("horizon", g.horizon);
        g.rate = s.get("rate", g.rate);
        s.finish();
        check(g.steps >= 1, "grid.steps", "must be >= 1");
        check(g.horizon > 0.0, "grid.horizon", "must be > 0");
        check(std::isfinite(g.rate), "grid.rate", "must be finite");
    }
    {
        Section s = root.sub("scenario");
        auto& sc = cfg.scenario;
        sc.model = s.get("model", sc.model);
        check(sc.model == "gbm" || sc.model == "garch_pca" || sc.model == "csv", "scenario.model",
              "unknown model '" + sc.model + "' (expected gbm, garch_pca or csv)");
        Section g = s.sub("gbm");
        sc.gbm.drift = g.get("drift", sc.gbm.drift);
        sc.gbm.volatility = g.get("volatility", sc.gbm.volatility);
        sc.gbm.correlation = g.get("correlation", sc.gbm.correlation);
        sc.gbm.initial = g.get("initial", sc.gbm.initial);
        g.finish();
        const auto d = sc.gbm.volatility.size();
        check(d >= 1, "scenario.gbm.volatility", "needs at least one asset");
        check(sc.gbm.drift.size() == d, "scenario.gbm.drift", "length must match scenario.gbm.volatility");
        check(sc.gbm.initial.size() == d, "scenario.gbm.initial", "length must match scenario.gbm.volatility");
        for (double v : sc.gbm.volatility) check(v >= 0.0, "scenario.gbm.volatility", "must be >= 0");
        for (double x : sc.gbm.initial) check(x > 0.0, "scenario.gbm.initial", "must be > 0");
        if (!sc.gbm.correlation.empty()) {
            check(sc.gbm.correlation.size() == d, "scenario.gbm.correlation", "must be a d x d matrix");
            for (const auto& row : sc.gbm.correlation)
                check(row.size() == d, "scenario.gbm.correlation", "must be a d x d matrix");
        }
        Section gp = s.sub("garch_pca");
        auto& m = sc.garch_pca;
        m.sources = gp.get("sources", m.sources);
        m.substeps = gp.get("substeps", m.substeps);
        m.initial = gp.get("initial", m.initial);
        m.max_iterations = gp.get("max_iterations", m.max_iterations);
        m.restarts = gp.get("restarts", m.restarts);
        gp.finish();
        check(m.substeps >= 1, "scenario.garch_pca.substeps", "must be >= 1");
        check(m.max_iterations >= 1, "scenario.garch_pca.max_iterations", "must be >= 1");
        check(m.restarts >= 0, "scenario.garch_pca.restarts", "must be >= 0");
        if (sc.model == "garch_pca") {
            check(!m.sources.empty(), "scenario.garch_pca.sources", "needs at least one price file");
            check(m.initial.empty() || m.initial.size() == m.sources.size(), "scenario.garch_pca.initial",
                  "needs one price per source");
        }
        Section c = s.sub("csv");
        sc.csv_file = c.get("file", sc.csv_file);
        c.finish();
        if (sc.model == "csv") check(!sc.csv_file.empty(), "scenario.csv.file", "missing path file");
        s.finish();
    }
    {
        Section s = root.sub("claim");
        auto& c = cfg.claim;
        const std::string implied = command == Command::price_exchange      ? "exchange"
                                    : command == Command::price_real_option ? "real_option"
                                                                            : "call";
        c.kind = s.get("kind", implied);
        check(c.kind == "call" || c.kind == "exchange" || c.kind == "real_option", "claim.kind",
              "unknown claim kind '" + c.kind + "' (expected call, exchange or real_option)");
        if (command == Command::price_european || command == Command::price_exchange ||
            command == Command::price_real_option)
            check(c.kind == implied, "claim.kind", "command " + command_name(command) + " needs kind " + implied);
        c.strike = s.get("strike", c.kind == "real_option" ? 3.5 : c.strike);
        c.asset = s.get("asset", c.asset);
        if (const json* spots = s.raw("spots")) {
            if (!spots->is_array()) throw ConfigError("claim.spots", "expected an array");
            for (std::size_t i = 0; i < spots->size(); ++i) {
                const std::string where = "claim.spots[" + std::to_string(i) + "]";
                if ((*spots)[i].is_array())
                    c.spots.push_back(Section::convert<std::vector<double>>((*spots)[i], where));
                else
                    c.spots.push_back({Section::convert<double>((*spots)[i], where)});
            }
        }
        c.window_first = s.get("window_first", c.window_first);
        c.window_last = s.optional<int>("window_last");
        c.valuation_step = s.optional<int>("valuation_step");
        s.finish();
        check(c.strike >= 0.0, "claim.strike", "must be >= 0");
        check(c.asset >= 0, "claim.asset", "must be >= 0");
        for (const auto& sp : c.spots)
            for (double x : sp) check(x > 0.0, "claim.spots", "spot prices must be > 0");
        check(c.window_first >= 0 && c.window_first <= cfg.grid.steps, "claim.window_first", "must lie in [0, grid.steps]");
        if (c.window_last)
            check(*c.window_last >= c.window_first && *c.window_last <= cfg.grid.steps, "claim.window_last",
                  "must lie in [claim.window_first, grid.steps]");
        if (c.valuation_step)
            check(*c.valuation_step >= 0 && *c.valuation_step <= c.window_first, "claim.valuation_step",
                  "must lie in [0, claim.window_first]");
    }
    {
        Section s = root.sub("oracle");
        auto& o = cfg.oracle;
        o.kind = s.get("kind", o.kind);
        check(o.kind == "clipped_spread" || o.kind == "external_csv", "oracle.kind",
              "unknown oracle '" + o.kind + "' (expected clipped_spread or external_csv)");
        o.a = s.get("a", o.a);
        o.b_coef = s.get("b_coef", o.b_coef);
        o.running_cost = s.get("running_cost", o.running_cost);
        o.noise_std = s.get("noise_std", o.noise_std);
        o.noise_seed = s.get("noise_seed", o.noise_seed);
        o.file = s.get("file", o.file);
        s.finish();
        check(o.noise_std >= 0.0, "oracle.noise_std", "must be >= 0");
        if (o.kind == "external_csv") check(!o.file.empty(), "oracle.file", "missing cash-flow file");
    }
    {
        Section s = root.sub("basis");
        auto& b = cfg.basis;
        b.family = s.get("family", b.family);
        check(b.family == "monomial", "basis.family", "unknown basis family '" + b.family + "' (expected monomial)");
        b.degree = s.get("degree", b.degree);
        b.tensor = s.get("tensor", b.tensor);
        if (const json* sc = s.raw("scaling")) b.scaling = *sc;
        s.finish();
        check(b.degree >= 0 && b.degree <= 10, "basis.degree", "must lie in [0, 10]");
        const bool named = b.scaling.is_string() && (b.scaling == "auto" || b.scaling == "none");
        if (!named) {
            const auto v = Section::convert<std::vector<double>>(b.scaling, "basis.scaling");
            for (double x : v) check(x > 0.0, "basis.scaling", "scales must be > 0");
        }
    }
    {
        Section s = root.sub("engine");
        auto& e = cfg.engine;
        e.seed = s.get("seed", e.seed);
        e.paths = s.get("paths", e.paths);
        e.hedge = s.get("hedge", e.hedge);
        e.rank_tolerance = s.get("rank_tolerance", e.rank_tolerance);
        s.finish();
        check(e.paths >= 1, "engine.paths", "must be >= 1");
        check(e.rank_tolerance > 0.0 && e.rank_tolerance < 1.0, "engine.rank_tolerance", "must lie in (0, 1)");
    }
    {
        Section s = root.sub("output");
        auto& o = cfg.output;
        o.dir = s.get("dir", o.dir);
        o.fan = s.get("fan", o.fan);
        o.scatter = s.get("scatter", o.scatter);
        o.quantiles = s.get("quantiles", o.quantiles);
        o.precision = s.get("precision", o.precision);
        o.paths = s.get("paths", o.paths);
        o.flows = s.get("flows", o.flows);
        o.scatter_step = s.optional<int>("scatter_step");
        s.finish();
        detail::check_quantiles(o.quantiles, "output.quantiles");
        check(o.precision >= 0 && o.precision <= 17, "output.precision", "must lie in [0, 17]");
        if (o.scatter_step)
            check(*o.scatter_step >= 0 && *o.scatter_step <= cfg.grid.steps, "output.scatter_step",
                  "must lie in [0, grid.steps]");
    }
    {
        Section s = root.sub("validate");
        auto& v = cfg.validate;
        v.price_tolerance = s.get("price_tolerance", v.price_tolerance);
        v.se_multiple = s.get("se_multiple", v.se_multiple);
        v.delta_tolerance = s.get("delta_tolerance", v.delta_tolerance);
        v.spots = s.get("spots", v.spots);
        v.strike = s.get("strike", v.strike);
        v.volatility = s.get("volatility", v.volatility);
        v.rate = s.get("rate", v.rate);
        v.horizon = s.get("horizon", v.horizon);
        v.steps = s.get("steps", v.steps);
        v.paths = s.get("paths", v.paths);
        v.exchange_volatility = s.get("exchange_volatility", v.exchange_volatility);
        v.exchange_spots = s.get("exchange_spots", v.exchange_spots);
        v.exchange_horizon = s.get("exchange_horizon", v.exchange_horizon);
        v.exchange_paths = s.get("exchange_paths", v.exchange_paths);
        s.finish();
        check(!v.spots.empty(), "validate.spots", "needs at least one spot");
        check(v.steps >= 1 && v.horizon > 0.0, "validate.steps", "steps and horizon must be positive");
        check(v.exchange_volatility.size() == 2, "validate.exchange_volatility", "needs two volatilities");
        check(v.exchange_spots.size() == 2, "validate.exchange_spots", "needs two spots");
        check(v.paths >= 1 && v.exchange_paths >= 1, "validate.paths", "must be >= 1");
    }
    root.finish();
    return cfg;
}

/// Every setting after defaults and overrides, as JSON. The output
/// directory is left out so reports do not depend on where they are written.
[[nodiscard]] inline json resolved_json(const RunConfig& c) {
    json j;
    j["command"] = command_name(c.command);
    j["grid"] = {{"steps", c.grid.steps}, {"horizon", c.grid.horizon}, {"rate", c.grid.rate}};
    j["scenario"]["model"] = c.scenario.model;
    if (c.scenario.model == "gbm") {
        j["scenario"]["gbm"] = {{"drift", c.scenario.gbm.drift},
                                {"volatility", c.scenario.gbm.volatility},
                                {"correlation", c.scenario.gbm.correlation},
                                {"initial", c.scenario.gbm.initial}};
    } else if (c.scenario.model == "garch_pca") {
        const auto& m = c.scenario.garch_pca;
        j["scenario"]["garch_pca"] = {{"sources", m.sources},
                                      {"substeps", m.substeps},
                                      {"initial", m.initial},
                                      {"max_iterations", m.max_iterations},
                                      {"restarts", m.restarts}};
    } else {
        j["scenario"]["csv"] = {{"file", c.scenario.csv_file}};
    }
    j["claim"] = {{"kind", c.claim.kind},         {"strike", c.claim.strike},
                  {"asset", c.claim.asset},       {"spots", c.claim.spots},
                  {"window_first", c.claim.window_first}};
    j["claim"]["window_last"] = c.claim.window_last ? json(*c.claim.window_last) : json(nullptr);
    j["claim"]["valuation_step"] = c.claim.valuation_step ? json(*c.claim.valuation_step) : json(nullptr);
    j["oracle"] = {{"kind", c.oracle.kind},           {"a", c.oracle.a},
                   {"b_coef", c.oracle.b_coef},       {"running_cost", c.oracle.running_cost},
                   {"noise_std", c.oracle.noise_std}, {"noise_seed", c.oracle.noise_seed},
                   {"file", c.oracle.file}};
    j["basis"] = {{"family", c.basis.family}, {"degree", c.basis.degree}, {"tensor", c.basis.tensor},
                  {"scaling", c.basis.scaling}};
    j["engine"] = {{"seed", c.engine.seed},
                   {"paths", c.engine.paths},
                   {"hedge", c.engine.hedge},
                   {"rank_tolerance", c.engine.rank_tolerance}};
    j["output"] = {{"fan", c.output.fan},       {"scatter", c.output.scatter}, {"quantiles", c.output.quantiles},
                   {"precision", c.output.precision}, {"paths", c.output.paths}, {"flows", c.output.flows}};
    j["output"]["scatter_step"] = c.output.scatter_step ? json(*c.output.scatter_step) : json(nullptr);
    if (c.command == Command::validate) {
        const auto& v = c.validate;
        j["validate"] = {{"price_tolerance", v.price_tolerance},
                         {"se_multiple", v.se_multiple},
                         {"delta_tolerance", v.delta_tolerance},
                         {"spots", v.spots},
                         {"strike", v.strike},
                         {"volatility", v.volatility},
                         {"rate", v.rate},
                         {"horizon", v.horizon},
                         {"steps", v.steps},
                         {"paths", v.paths},
                         {"exchange_volatility", v.exchange_volatility},
                         {"exchange_spots", v.exchange_spots},
                         {"exchange_horizon", v.exchange_horizon},
                         {"exchange_paths", v.exchange_paths}};
    }
    return j;
}

/// Flattens to sorted `key.path=value` lines with values in compact JSON.
inline void flatten(const json& j, const std::string& prefix, std::vector<std::string>& out) {
    if (j.is_object() && !j.empty()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    out.push_back(prefix + "=" + j.dump());
}

[[nodiscard]] inline std::vector<std::string> resolved_lines(const RunConfig& c) {
    std::vector<std::string> out;
    flatten(resolved_json(c), "", out);
    return out;
}

}  // namespace hmc::cli
