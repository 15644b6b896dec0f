// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header for the wideband hybrid beamforming toolkit.

#include "hbfsim/beamform.hpp"
#include "hbfsim/channel.hpp"
#include "hbfsim/config.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/linalg.hpp"
#include "hbfsim/montecarlo.hpp"
#include "hbfsim/pipeline.hpp"
#include "hbfsim/power.hpp"
#include "hbfsim/quadrature.hpp"
#include "hbfsim/rng.hpp"
#include "hbfsim/solvers.hpp"
#include "hbfsim/squint.hpp"
#include "hbfsim/types.hpp"
