// Hedged Monte Carlo valuation of financial and real options.
#pragma once

#include "hmc/analytic.hpp"
#include "hmc/basis.hpp"
#include "hmc/core.hpp"
#include "hmc/csv.hpp"
#include "hmc/engine.hpp"
#include "hmc/oracle.hpp"
#include "hmc/parallel.hpp"
#include "hmc/random.hpp"
#include "hmc/regress.hpp"
#include "hmc/scenarios.hpp"
