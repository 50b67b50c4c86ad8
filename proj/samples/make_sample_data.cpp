// Writes the synthetic daily price series used by the sample configurations:
// an equity-like and a gas-index-like asset on business days from
// 2004-08-19 to 2013-11-22, each following a known GARCH(1,1). The gas
// series skips a few dates so that ingestion has rows to drop. Each return
// series is shifted by a constant so the last price lands on `end`, near
// the observed late-2013 levels of the assets they imitate.
//
//   make_sample_data <output dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hmc/csv.hpp"
#include "hmc/scenarios/garch.hpp"

namespace {

std::vector<std::string> business_days(std::chrono::sys_days from, std::chrono::sys_days to) {
    using namespace std::chrono;
    std::vector<std::string> out;
    for (sys_days d = from; d <= to; d += days{1}) {
        const weekday wd{d};
        if (wd == Saturday || wd == Sunday) continue;
        const year_month_day ymd{d};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
        out.emplace_back(buf);
    }
    return out;
}

void write_series(const std::filesystem::path& file, const std::vector<std::string>& dates, double start, double end,
                  std::vector<double> returns, int skip_every) {
    returns.resize(dates.size() - 1);
    double total = 0.0;
    for (double r : returns) total += r;
    const double shift = (std::log(end / start) - total) / static_cast<double>(returns.size());
    for (double& r : returns) r += shift;
    auto os = hmc::csv::open_output(file);
    os << "date,price\n";
    double price = start;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (t > 0) price *= std::exp(returns[t - 1]);
        if (skip_every > 0 && t % static_cast<std::size_t>(skip_every) == 17) continue;
        os << dates[t] << ',' << hmc::csv::format_number(price, 8) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace std::chrono;
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    const auto dates = business_days(sys_days{2004y / August / 19}, sys_days{2013y / November / 22});

    hmc::scenarios::GarchParams equity;
    equity.mean = 0.0009;
    equity.omega = 4e-6;
    equity.alpha = 0.07;
    equity.beta = 0.91;

    hmc::scenarios::GarchParams gas;
    gas.mean = -0.0002;
    gas.omega = 2.4e-5;
    gas.alpha = 0.09;
    gas.beta = 0.89;

    write_series(dir / "equity.csv", dates, 100.0, 1030.0, hmc::scenarios::simulate_garch_series(equity, dates.size(), 2004, 1), 0);
    write_series(dir / "gas.csv", dates, 5.5, 3.7, hmc::scenarios::simulate_garch_series(gas, dates.size(), 2004, 2), 250);
    std::cout << "wrote " << dates.size() << " business days to " << dir << '\n';
}
