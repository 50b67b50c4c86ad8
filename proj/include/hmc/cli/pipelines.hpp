// One function per command. Each writes its artifacts into the output
// directory and returns true when every check it performs passes.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "hmc/analytic.hpp"
#include "hmc/cli/config.hpp"
#include "hmc/cli/report.hpp"
#include "hmc/cli/svg.hpp"
#include "hmc/csv.hpp"
#include "hmc/engine.hpp"
#include "hmc/oracle.hpp"
#include "hmc/scenarios.hpp"

namespace hmc::cli {

struct Context {
    const RunConfig& cfg;
    std::filesystem::path out_dir;
    std::ostream& log;

    [[nodiscard]] std::filesystem::path file(const std::string& name) const { return out_dir / name; }

    void write(const Table& table, const std::string& name) const {
        Table copy = table;
        copy.set_header(resolved_lines(cfg));
        copy.write(file(name), cfg.output.precision);
    }
};

/// Runs `fn`, reporting library errors as configuration errors of `section`.
/// File and parse errors pass through unchanged.
template <class F>
auto in_section(const std::string& section, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const IoError&) {
        throw;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(section, e.what());
    }
}

// ---------------------------------------------------------------- building blocks

[[nodiscard]] inline TimeGrid make_grid(const GridConfig& g) {
    return TimeGrid(g.steps, g.horizon / g.steps, g.rate);
}

[[nodiscard]] inline scenarios::GbmParams gbm_params(const GbmConfig& g, const std::vector<double>& initial) {
    const auto d = static_cast<Eigen::Index>(g.volatility.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.correlation.size()); ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            corr(i, j) = g.correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return {g.drift, g.volatility, corr, initial};
}

/// Source of scenario paths. GARCH models are calibrated once and reused
/// across spot sweeps.
class ScenarioSource {
public:
    explicit ScenarioSource(const RunConfig& cfg) : cfg_(cfg), grid_(make_grid(cfg.grid)) {
        if (cfg.scenario.model == "garch_pca") {
            const auto& m = cfg.scenario.garch_pca;
            std::vector<std::filesystem::path> files;
            for (const auto& s : m.sources) files.push_back(cfg.resolve(s));
            aligned_ = scenarios::ingest_prices(files);
            scenarios::GarchCalibrationOptions opts;
            opts.max_iterations = m.max_iterations;
            opts.max_restarts = m.restarts;
            model_ = in_section("scenario.garch_pca", [&] { return scenarios::calibrate_garch_pca(aligned_, opts); });
        }
    }

    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] std::size_t n_assets() const {
        if (cfg_.scenario.model == "gbm") return cfg_.scenario.gbm.volatility.size();
        if (cfg_.scenario.model == "garch_pca") return model_.fits.size();
        return 0;  // known after reading the file
    }
    [[nodiscard]] const scenarios::GarchPcaModel& model() const { return model_; }
    [[nodiscard]] const scenarios::AlignedPrices& aligned() const { return aligned_; }

    [[nodiscard]] std::vector<double> default_initial() const {
        if (cfg_.scenario.model == "gbm") return cfg_.scenario.gbm.initial;
        if (cfg_.scenario.model == "garch_pca")
            return cfg_.scenario.garch_pca.initial.empty() ? model_.last_prices : cfg_.scenario.garch_pca.initial;
        return {};
    }

    [[nodiscard]] PathSet paths(const std::vector<double>& initial) const {
        const auto& sc = cfg_.scenario;
        const auto n = cfg_.engine.paths;
        if (sc.model == "gbm")
            return in_section("scenario.gbm", [&] {
                return scenarios::simulate_gbm(gbm_params(sc.gbm, initial), grid_, n, cfg_.engine.seed);
            });
        if (sc.model == "garch_pca")
            return in_section("scenario.garch_pca", [&] {
                return scenarios::simulate_garch_pca(model_.params(), model_.pca, grid_, n, initial, cfg_.engine.seed,
                                                     sc.garch_pca.substeps);
            });
        auto is = csv::open_input(cfg_.resolve(sc.csv_file));
        PathSet p = csv::read_paths(is, grid_.dt(), grid_.rate());
        if (p.grid().t0() != 0 || p.grid().n_steps() != grid_.n_steps())
            throw ConfigError("scenario.csv.file", "path file covers steps " + std::to_string(p.grid().t0()) + ".." +
                                                       std::to_string(p.grid().t0() + p.grid().n_steps()) +
                                                       ", expected 0.." + std::to_string(grid_.n_steps()));
        in_section("scenario.csv.file", [&] { p.check(true); });
        return p;
    }

private:
    const RunConfig& cfg_;
    TimeGrid grid_;
    scenarios::AlignedPrices aligned_;
    scenarios::GarchPcaModel model_;
};

[[nodiscard]] inline BasisSpec make_basis(const BasisConfig& b, const PathSet& paths) {
    return in_section("basis", [&] {
        const auto family = parse_basis_family(b.family);
        if (!family) throw ConfigError("basis.family", "unknown basis family '" + b.family + "'");
        BasisSpec spec(*family, b.degree, paths.n_assets(), b.tensor);
        if (b.scaling.is_string()) return b.scaling == "auto" ? spec.with_auto_scaling(paths) : spec;
        return spec.with_scaling(b.scaling.get<std::vector<double>>());
    });
}

[[nodiscard]] inline EngineOptions engine_options(const EngineConfig& e) {
    EngineOptions o;
    o.stage.hedge = e.hedge;
    o.stage.rank_tolerance = e.rank_tolerance;
    return o;
}

[[nodiscard]] inline oracle::OracleSpec oracle_spec(const RunConfig& cfg) {
    oracle::OracleSpec s;
    s.kind = cfg.oracle.kind == "external_csv" ? oracle::OracleKind::external_csv : oracle::OracleKind::clipped_spread;
    s.a = cfg.oracle.a;
    s.b_coef = cfg.oracle.b_coef;
    s.running_cost = cfg.oracle.running_cost;
    s.noise_std = cfg.oracle.noise_std;
    s.noise_seed = cfg.oracle.noise_seed;
    if (!cfg.oracle.file.empty()) s.csv_file = cfg.resolve(cfg.oracle.file);
    return s;
}

[[nodiscard]] inline std::pair<double, double> band_levels(const std::vector<double>& q) {
    return {*std::min_element(q.begin(), q.end()), *std::max_element(q.begin(), q.end())};
}

[[nodiscard]] inline std::vector<double> steps_axis(int first, int last) {
    std::vector<double> x;
    for (int t = first; t <= last; ++t) x.push_back(t);
    return x;
}

[[nodiscard]] inline std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Fan of a paths x time matrix restricted to columns [first, last].
[[nodiscard]] inline svg::FanChart fan_of(const Eigen::MatrixXd& m, int first, int last,
                                          const std::vector<double>& levels) {
    const auto [lo, hi] = band_levels(levels);
    const auto tab = quantile_fan(m.middleCols(first, last - first + 1), {lo, hi});
    svg::FanChart c;
    c.x = steps_axis(first, last);
    c.lower = to_vector(tab.quantiles.col(0));
    c.upper = to_vector(tab.quantiles.col(1));
    c.mean = to_vector(tab.mean);
    c.band_label = quantile_column(lo) + "-" + quantile_column(hi);
    return c;
}

inline std::vector<std::string> spot_columns(std::size_t d) {
    if (d == 1) return {"spot"};
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= d; ++k) out.push_back("spot_" + std::to_string(k));
    return out;
}

inline void add_stage_rows(Table& t, const ValuationResult& res, const std::vector<Cell>& prefix) {
    for (const auto& st : res.stages) {
        std::vector<Cell> row = prefix;
        row.push_back(integer(st.t));
        row.push_back(integer(static_cast<long long>(st.n_paths_used)));
        row.push_back(integer(static_cast<long long>(st.rank)));
        row.push_back(num(st.local_risk));
        for (Eigen::Index a = 0; a < st.gamma.size(); ++a) row.push_back(num(st.gamma(a)));
        for (Eigen::Index a = 0; a < st.psi.rows(); ++a)
            for (Eigen::Index k = 0; k < st.psi.cols(); ++k) row.push_back(num(st.psi(a, k)));
        t.add_row(std::move(row));
    }
}

/// Columns of stages.csv: gamma_<a> for value element a, psi_<a>_<k> for
/// hedge element a of asset k (1-based).
inline std::vector<std::string> stage_columns(std::vector<std::string> prefix, std::size_t b, std::size_t d) {
    prefix.insert(prefix.end(), {"t", "n_paths", "rank", "local_risk"});
    for (std::size_t a = 0; a < b; ++a) prefix.push_back("gamma_" + std::to_string(a));
    for (std::size_t a = 0; a < b; ++a)
        for (std::size_t k = 1; k <= d; ++k) prefix.push_back("psi_" + std::to_string(a) + "_" + std::to_string(k));
    return prefix;
}

// ---------------------------------------------------------------- terminal claims

struct TerminalQuote {
    std::vector<double> spot;
    ValuationResult result;
    Eigen::VectorXd delta;
    std::optional<analytic::AnalyticQuote> analytic;
};

/// Prices a terminal claim across the configured spot sweep.
[[nodiscard]] inline std::vector<TerminalQuote> price_terminal(const RunConfig& cfg, const ScenarioSource& src,
                                                               const ClaimSpec& claim) {
    std::vector<std::vector<double>> spots = cfg.claim.spots;
    if (spots.empty()) spots.push_back(src.default_initial());
    if (cfg.scenario.model == "csv" && !cfg.claim.spots.empty())
        throw ConfigError("claim.spots", "a spot sweep needs a simulated scenario, not a path file");
    std::vector<TerminalQuote> out;
    for (const auto& spot : spots) {
        if (cfg.scenario.model != "csv" && spot.size() != src.n_assets())
            throw ConfigError("claim.spots", "each spot needs " + std::to_string(src.n_assets()) + " prices");
        const PathSet paths = src.paths(spot);
        if (static_cast<std::size_t>(cfg.claim.asset) >= paths.n_assets())
            throw ConfigError("claim.asset", "asset index outside the scenario");
        const BasisSpec basis = make_basis(cfg.basis, paths);
        ValuationResult res = in_section("engine", [&] { return price_european(paths, claim, basis, engine_options(cfg.engine)); });
        Eigen::VectorXd x0 = paths.slice(0).row(0).transpose();
        Eigen::VectorXd delta = hedge_ratio(res.stage(0), basis, x0);
        out.push_back({{x0.data(), x0.data() + x0.size()}, std::move(res), std::move(delta), std::nullopt});
    }
    return out;
}

inline void emit_terminal(const Context& ctx, const std::vector<TerminalQuote>& quotes, bool exchange) {
    const auto& cfg = ctx.cfg;
    const std::size_t d = quotes.front().spot.size();
    const auto spot_cols = spot_columns(d);

    std::vector<std::string> cols = spot_cols;
    cols.insert(cols.end(), {"hmc_price", "std_error", "analytic_price"});
    if (exchange) {
        cols.insert(cols.end(), {"hmc_delta_1", "hmc_delta_2", "analytic_delta_1", "analytic_delta_2"});
    } else {
        cols.insert(cols.end(), {"hmc_delta", "analytic_delta"});
    }
    Table report(cols);
    Table values(spot_cols.size() == 1 ? std::vector<std::string>{"spot", "path", "value"} : [&] {
        auto c = spot_cols;
        c.insert(c.end(), {"path", "value"});
        return c;
    }());
    Table stages(stage_columns(spot_cols, quotes.front().result.basis.size(), d));

    for (const auto& q : quotes) {
        std::vector<Cell> prefix;
        for (double s : q.spot) prefix.push_back(num(s));
        std::vector<Cell> row = prefix;
        row.push_back(num(q.result.price()));
        row.push_back(num(q.result.std_error()));
        row.push_back(q.analytic ? num(q.analytic->price) : blank());
        if (exchange) {
            row.push_back(num(q.delta(0)));
            row.push_back(num(q.delta(1)));
            row.push_back(q.analytic ? num(q.analytic->deltas[0]) : blank());
            row.push_back(q.analytic ? num(q.analytic->deltas[1]) : blank());
        } else {
            row.push_back(num(q.delta(cfg.claim.asset)));
            row.push_back(q.analytic ? num(q.analytic->deltas[0]) : blank());
        }
        report.add_row(std::move(row));
        for (Eigen::Index i = 0; i < q.result.value_t0.size(); ++i) {
            std::vector<Cell> v = prefix;
            v.push_back(integer(i));
            v.push_back(num(q.result.value_t0(i)));
            values.add_row(std::move(v));
        }
        add_stage_rows(stages, q.result, prefix);
    }
    ctx.write(report, "report.csv");
    ctx.write(values, "values_t0.csv");
    ctx.write(stages, "stages.csv");

    if (cfg.output.fan) {
        const auto& first = quotes.front().result;
        svg::FanChart fan = fan_of(first.values, 0, first.last_step, cfg.output.quantiles);
        fan.title = "Hedged value process";
        fan.y_label = "value (currency)";
        svg::write(fan, ctx.file("fan.svg"));
    }
    if (cfg.output.scatter) {
        const std::size_t k = exchange ? 0 : static_cast<std::size_t>(cfg.claim.asset);
        svg::Series hmc{"HMC", {}, {}, "#1f4e9c", svg::Style::circles};
        svg::Series ref{exchange ? "Margrabe" : "Black-Scholes", {}, {}, "#c0392b", svg::Style::line};
        for (const auto& q : quotes) {
            const double x = exchange ? q.spot[0] / q.spot[1] : q.spot[k];
            hmc.x.push_back(x);
            hmc.y.push_back(q.result.price());
            if (q.analytic) {
                ref.x.push_back(x);
                ref.y.push_back(q.analytic->price);
            }
        }
        svg::ScatterChart sc{exchange ? "Exchange option price" : "Call price", exchange ? "spot ratio X1/X2" : "spot",
                             "price (currency)", {}};
        if (!ref.x.empty()) sc.series.push_back(ref);
        sc.series.push_back(hmc);
        svg::write(sc, ctx.file("scatter.svg"));
    }
}

inline bool run_price_european(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ScenarioSource src(cfg);
    auto quotes = price_terminal(cfg, src, ClaimSpec::european(call_payoff(cfg.claim.strike, static_cast<std::size_t>(cfg.claim.asset))));
    if (cfg.scenario.model == "gbm") {
        const double vol = cfg.scenario.gbm.volatility[static_cast<std::size_t>(cfg.claim.asset)];
        for (auto& q : quotes)
            q.analytic = analytic::black_scholes_call(q.spot[static_cast<std::size_t>(cfg.claim.asset)], cfg.claim.strike,
                                                      cfg.grid.rate, vol, cfg.grid.horizon);
    }
    emit_terminal(ctx, quotes, false);
    for (const auto& q : quotes)
        ctx.log << "spot " << q.spot[static_cast<std::size_t>(cfg.claim.asset)] << ": hmc " << q.result.price() << " (se "
                << q.result.std_error() << ")" << (q.analytic ? ", analytic " + std::to_string(q.analytic->price) : "")
                << '\n';
    return true;
}

inline bool run_price_exchange(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ScenarioSource src(cfg);
    if (cfg.scenario.model != "csv" && src.n_assets() != 2)
        throw ConfigError("scenario", "price-exchange needs exactly two assets");
    auto quotes = price_terminal(cfg, src, ClaimSpec::european(exchange_payoff()));
    if (cfg.scenario.model == "gbm") {
        const auto& g = cfg.scenario.gbm;
        const double corr = g.correlation.empty() ? 0.0 : g.correlation[0][1];
        for (auto& q : quotes)
            q.analytic = analytic::margrabe(q.spot[0], q.spot[1], g.volatility[0], g.volatility[1], corr, cfg.grid.horizon);
    }
    emit_terminal(ctx, quotes, true);
    for (const auto& q : quotes)
        ctx.log << "spots " << q.spot[0] << "/" << q.spot[1] << ": hmc " << q.result.price() << " (se "
                << q.result.std_error() << ")" << (q.analytic ? ", analytic " + std::to_string(q.analytic->price) : "")
                << '\n';
    return true;
}

// ---------------------------------------------------------------- real option

inline bool run_price_real_option(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.claim.spots.empty()) throw ConfigError("claim.spots", "not used by price-real-option");
    const ScenarioSource src(cfg);
    const PathSet paths = src.paths(src.default_initial());
    const CashFlowSet flows = in_section("oracle", [&] { return oracle::generate_cashflows(oracle_spec(cfg), paths); });
    const BasisSpec basis = make_basis(cfg.basis, paths);

    ClaimSpec claim = ClaimSpec::real_option(cfg.claim.strike, cfg.claim.window_first, cfg.claim.window_last.value_or(-1));
    claim.valuation_step = cfg.claim.valuation_step;
    const ValuationResult res =
        in_section("engine", [&] { return price_real_option(paths, flows, claim, basis, engine_options(cfg.engine)); });
    const double k = cfg.claim.strike;
    const int first = cfg.claim.window_first, last = res.last_step, start = res.valuation_step;

    Table report({"t", "mean_IV", "q05_IV", "q95_IV", "nu_t", "pr_t", "mean_option"});
    const Eigen::MatrixXd iv = res.project_values.array() - k;
    const auto iv_tab = quantile_fan(iv.middleCols(first, last - first + 1), {0.05, 0.95});
    for (const auto& st : res.exercise) {
        const Eigen::Index j = st.t - first;
        report.add_row({integer(st.t), num(iv_tab.mean(j)), num(iv_tab.quantiles(j, 0)), num(iv_tab.quantiles(j, 1)),
                        num(st.trigger), num(st.probability), num(res.values.col(st.t).mean())});
    }
    ctx.write(report, "report.csv");

    Table values({"path", "value", "project_value", "intrinsic"});
    for (Eigen::Index i = 0; i < res.value_t0.size(); ++i)
        values.add_row({integer(i), num(res.value_t0(i)), num(res.project_values(i, start)),
                        num(res.project_values(i, start) - k)});
    ctx.write(values, "values_t0.csv");

    Table stages(stage_columns({}, basis.size(), paths.n_assets()));
    add_stage_rows(stages, res, {});
    ctx.write(stages, "stages.csv");

    if (cfg.output.fan) {
        svg::FanChart fan = fan_of(iv, first, last, cfg.output.quantiles);
        fan.title = "Intrinsic value and exercise trigger";
        fan.y_label = "intrinsic value (currency)";
        svg::Series trigger{"trigger nu_t", fan.x, {}, "#c0392b", svg::Style::dashed};
        svg::Series option{"mean option value", fan.x, {}, "#2e7d32", svg::Style::line};
        for (const auto& st : res.exercise) {
            trigger.y.push_back(st.trigger.value_or(std::nan("")));
            option.y.push_back(res.values.col(st.t).mean());
        }
        fan.overlays = {trigger, option};
        svg::write(fan, ctx.file("fan.svg"));
    }
    if (cfg.output.scatter) {
        int s = cfg.output.scatter_step.value_or(first > 0 ? first : std::min(1, last));
        if (s < start || s > last)
            throw ConfigError("output.scatter_step", "must lie between the valuation step and the window end");
        svg::Series opt{"option value", {}, {}, "#1f4e9c", svg::Style::circles};
        svg::Series intr{"project value - K", {}, {}, "#c0392b", svg::Style::crosses};
        for (std::size_t i = 0; i < paths.n_paths(); ++i) {
            const double x = paths(i, static_cast<std::size_t>(s), 0);
            opt.x.push_back(x);
            opt.y.push_back(res.values(static_cast<Eigen::Index>(i), s));
            intr.x.push_back(x);
            intr.y.push_back(res.project_values(static_cast<Eigen::Index>(i), s) - k);
        }
        svg::write(svg::ScatterChart{"Option and intrinsic value at step " + std::to_string(s), "asset 1 price",
                                     "value (currency)", {intr, opt}},
                   ctx.file("scatter.svg"));
    }
    ctx.log << "real option value at step " << start << ": " << res.price() << " (se " << res.std_error() << ")\n";
    return true;
}

// ---------------------------------------------------------------- simulate

inline bool run_simulate(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ScenarioSource src(cfg);
    const PathSet paths = src.paths(src.default_initial());
    if (cfg.output.paths) {
        auto os = csv::open_output(ctx.file("paths.csv"));
        csv::write_paths(os, paths, cfg.output.precision);
    }
    std::vector<std::pair<std::string, Eigen::MatrixXd>> series;
    for (std::size_t k = 0; k < paths.n_assets(); ++k) series.emplace_back("asset_" + std::to_string(k + 1), paths.asset_matrix(k));
    if (cfg.output.flows) {
        const CashFlowSet flows = in_section("oracle", [&] { return oracle::generate_cashflows(oracle_spec(cfg), paths); });
        auto os = csv::open_output(ctx.file("flows.csv"));
        csv::write_flows(os, flows, cfg.output.precision);
        series.emplace_back("cashflow", flows.matrix());
    }
    std::vector<std::string> cols{"t", "series", "mean"};
    for (double q : cfg.output.quantiles) cols.push_back(quantile_column(q));
    Table report(cols);
    for (const auto& [name, m] : series) {
        const auto tab = quantile_fan(m, cfg.output.quantiles);
        for (Eigen::Index t = 0; t < m.cols(); ++t) {
            std::vector<Cell> row{integer(t), name, num(tab.mean(t))};
            for (Eigen::Index q = 0; q < tab.quantiles.cols(); ++q) row.push_back(num(tab.quantiles(t, q)));
            report.add_row(std::move(row));
        }
    }
    ctx.write(report, "report.csv");
    const int last = paths.grid().n_steps();
    if (cfg.output.fan) {
        svg::FanChart fan = fan_of(series.front().second, 0, last, cfg.output.quantiles);
        fan.title = "Simulated asset 1";
        fan.y_label = "price (currency)";
        svg::write(fan, ctx.file("fan.svg"));
    }
    if (cfg.output.scatter && paths.n_assets() >= 2) {
        svg::Series pts{"paths at horizon", {}, {}, "#1f4e9c", svg::Style::circles};
        for (std::size_t i = 0; i < paths.n_paths(); ++i) {
            pts.x.push_back(paths(i, static_cast<std::size_t>(last), 0));
            pts.y.push_back(paths(i, static_cast<std::size_t>(last), 1));
        }
        svg::write(svg::ScatterChart{"Joint distribution at the horizon", "asset 1", "asset 2", {pts}},
                   ctx.file("scatter.svg"));
    }
    ctx.log << "simulated " << paths.n_paths() << " paths of " << paths.n_assets() << " assets over " << last
            << " steps\n";
    return true;
}

// ---------------------------------------------------------------- calibrate-garch

inline bool run_calibrate_garch(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.scenario.model != "garch_pca")
        throw ConfigError("scenario.model", "calibrate-garch needs scenario.model = garch_pca");
    const ScenarioSource src(cfg);
    const auto& model = src.model();
    const auto& data = src.aligned();

    Table report({"asset", "source", "observations", "dropped_rows", "mean", "omega", "alpha", "beta", "persistence",
                  "unconditional_variance", "next_variance", "log_likelihood", "iterations"});
    for (std::size_t k = 0; k < model.fits.size(); ++k) {
        const auto& f = model.fits[k];
        report.add_row({integer(static_cast<long long>(k + 1)), data.names[k],
                        integer(static_cast<long long>(data.dates.size() - 1)), integer(static_cast<long long>(data.dropped_rows)),
                        num(f.params.mean), num(f.params.omega), num(f.params.alpha), num(f.params.beta),
                        num(f.params.persistence()), num(f.params.unconditional_variance()),
                        num(f.params.initial_variance), num(f.log_likelihood), integer(f.iterations)});
    }
    ctx.write(report, "report.csv");

    std::vector<std::string> cols{"component", "variance", "mean"};
    for (std::size_t k = 1; k <= model.pca.dim(); ++k) cols.push_back("loading_" + std::to_string(k));
    Table pca(cols);
    for (Eigen::Index j = 0; j < model.pca.variances.size(); ++j) {
        std::vector<Cell> row{integer(j + 1), num(model.pca.variances(j)), num(model.pca.mean(j))};
        for (Eigen::Index k = 0; k < model.pca.components.rows(); ++k) row.push_back(num(model.pca.components(k, j)));
        pca.add_row(std::move(row));
    }
    ctx.write(pca, "pca.csv");
    for (std::size_t k = 0; k < model.fits.size(); ++k)
        ctx.log << data.names[k] << ": alpha " << model.fits[k].params.alpha << ", beta " << model.fits[k].params.beta
                << '\n';
    return true;
}

// ---------------------------------------------------------------- validate

/// Closed-form comparison suite: Black-Scholes over a spot sweep and one
/// Margrabe exchange option.
inline bool run_validate(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& v = cfg.validate;
    Table report({"case", "spot_1", "spot_2", "hmc_price", "std_error", "analytic_price", "abs_error", "tolerance",
                  "hmc_delta", "analytic_delta", "pass"});
    bool all = true;
    auto check = [&](const std::string& name, std::optional<double> s2, const ValuationResult& res, double x1,
                     const Eigen::VectorXd& delta, const analytic::AnalyticQuote& ref) {
        const double err = std::abs(res.price() - ref.price);
        const double tol = std::max(v.price_tolerance, v.se_multiple * res.std_error());
        const double delta_err = std::abs(delta(0) - ref.deltas[0]);
        const bool ok = err <= tol && delta_err <= v.delta_tolerance;
        all = all && ok;
        report.add_row({name, num(x1), num(s2), num(res.price()), num(res.std_error()), num(ref.price), num(err),
                        num(tol), num(delta(0)), num(ref.deltas[0]), std::string(ok ? "true" : "false")});
        ctx.log << (ok ? "PASS " : "FAIL ") << name << " spot " << x1 << ": hmc " << res.price() << " analytic "
                << ref.price << '\n';
    };
    const auto opts = engine_options(cfg.engine);

    const TimeGrid bs_grid(v.steps, v.horizon / v.steps, v.rate);
    for (double spot : v.spots) {
        const PathSet p = scenarios::simulate_gbm(scenarios::GbmParams::independent({0.0}, {v.volatility}, {spot}),
                                                  bs_grid, v.paths, cfg.engine.seed);
        const BasisSpec basis = make_basis(cfg.basis, p);
        const auto res = price_european(p, ClaimSpec::european(call_payoff(v.strike)), basis, opts);
        Eigen::VectorXd x0(1);
        x0 << spot;
        check("black_scholes", std::nullopt, res, spot, hedge_ratio(res.stage(0), basis, x0),
              analytic::black_scholes_call(spot, v.strike, v.rate, v.volatility, v.horizon));
    }

    const TimeGrid ex_grid(v.steps, v.exchange_horizon / v.steps, v.rate);
    const auto& s = v.exchange_spots;
    const PathSet p = scenarios::simulate_gbm(
        scenarios::GbmParams::independent({0.0, 0.0}, v.exchange_volatility, s), ex_grid, v.exchange_paths, cfg.engine.seed);
    const BasisSpec basis = make_basis(cfg.basis, p);
    const auto res = price_european(p, ClaimSpec::european(exchange_payoff()), basis, opts);
    Eigen::VectorXd x0(2);
    x0 << s[0], s[1];
    check("margrabe", s[1], res, s[0], hedge_ratio(res.stage(0), basis, x0),
          analytic::margrabe(s[0], s[1], v.exchange_volatility[0], v.exchange_volatility[1], 0.0, v.exchange_horizon));

    ctx.write(report, "report.csv");
    return all;
}

[[nodiscard]] inline bool run_pipeline(const Context& ctx) {
    switch (ctx.cfg.command) {
        case Command::price_european: return run_price_european(ctx);
        case Command::price_exchange: return run_price_exchange(ctx);
        case Command::price_real_option: return run_price_real_option(ctx);
        case Command::simulate: return run_simulate(ctx);
        case Command::calibrate_garch: return run_calibrate_garch(ctx);
        case Command::validate: return run_validate(ctx);
    }
    return false;
}

}  // namespace hmc::cli
