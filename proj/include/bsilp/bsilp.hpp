#pragma once

// Umbrella header for the whole library.

#include "bsilp/errors.hpp"
#include "bsilp/feasibility.hpp"
#include "bsilp/instance_io.hpp"
#include "bsilp/lower_level.hpp"
#include "bsilp/measure.hpp"
#include "bsilp/model.hpp"
#include "bsilp/optimize.hpp"
#include "bsilp/rational.hpp"
#include "bsilp/region.hpp"
#include "bsilp/risk.hpp"
#include "bsilp/rng.hpp"
#include "bsilp/stability.hpp"
