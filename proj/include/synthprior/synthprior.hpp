#pragma once

#include "synthprior/diagnostics.hpp"
#include "synthprior/error.hpp"
#include "synthprior/gibbs.hpp"
#include "synthprior/model.hpp"
#include "synthprior/polya_gamma.hpp"
#include "synthprior/prior.hpp"
#include "synthprior/random.hpp"
#include "synthprior/ridge.hpp"
#include "synthprior/scenarios.hpp"
