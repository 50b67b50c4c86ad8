// Scenario generation under the historical measure.
#pragma once

#include "hmc/scenarios/garch.hpp"
#include "hmc/scenarios/garch_pca.hpp"
#include "hmc/scenarios/gbm.hpp"
#include "hmc/scenarios/ingest.hpp"
#include "hmc/scenarios/nelder_mead.hpp"
#include "hmc/scenarios/pca.hpp"
