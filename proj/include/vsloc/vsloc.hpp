#pragma once

// Umbrella header: RSS model, intersection geometry, vote-based localizer,
// attacker detector, Monte Carlo harness, and the file formats around them.

#include "vsloc/config.hpp"
#include "vsloc/csv.hpp"
#include "vsloc/detector.hpp"
#include "vsloc/errors.hpp"
#include "vsloc/geometry.hpp"
#include "vsloc/model.hpp"
#include "vsloc/rng.hpp"
#include "vsloc/selftest.hpp"
#include "vsloc/sim.hpp"
#include "vsloc/sweep.hpp"
#include "vsloc/trace.hpp"
#include "vsloc/vec2.hpp"
#include "vsloc/votes.hpp"
