// Ingest two daily price series, fit GARCH(1,1) + PCA, simulate 36 monthly
// steps, generate clipped-spread cash flows and value the option to invest.

#include <cstdio>
#include <filesystem>

#include "hmc/hmc.hpp"

int main(int argc, char** argv) {
    using namespace hmc;
    const std::filesystem::path data = argc > 1 ? argv[1] : std::filesystem::path(HMC_SAMPLES_DIR) / "data";

    const auto aligned = scenarios::ingest_prices({data / "equity.csv", data / "gas.csv"});
    const auto model = scenarios::calibrate_garch_pca(aligned);
    for (std::size_t k = 0; k < model.fits.size(); ++k)
        std::printf("%s: omega %.3g alpha %.4f beta %.4f\n", aligned.names[k].c_str(), model.fits[k].params.omega,
                    model.fits[k].params.alpha, model.fits[k].params.beta);

    const TimeGrid grid(36, 1.0 / 12, 0.08);
    const PathSet paths = scenarios::simulate_garch_pca(model.params(), model.pca, grid, 5000, model.last_prices, 11, 21);

    oracle::OracleSpec cash;
    cash.a = 1.2895e-4;
    cash.b_coef = -5.3191e-5;
    cash.running_cost = 0.05;
    cash.noise_std = 0.005;
    cash.noise_seed = 12;
    const CashFlowSet flows = oracle::generate_cashflows(cash, paths);

    const BasisSpec basis = BasisSpec::monomial(2, 2).with_auto_scaling(paths);
    const auto res = price_real_option(paths, flows, ClaimSpec::real_option(3.5, 0, 36), basis);

    std::printf("option value %.4f (se %.4f)\n", res.price(), res.std_error());
    std::printf("%4s %10s %10s %8s\n", "t", "mean_IV", "nu_t", "pr_t");
    for (const auto& st : res.exercise) {
        const double iv = res.project_values.col(st.t).mean() - 3.5;
        std::printf("%4d %10.4f %10.4f %8.4f\n", st.t, iv, st.trigger.value_or(std::nan("")), st.probability.value_or(0.0));
    }
}
