#pragma once

// Core library. The CLI layer (config, report, experiments) lives under
// hypoco/cli/ and additionally needs the vendored json.hpp.

#include "hypoco/errors.hpp"
#include "hypoco/rng.hpp"
#include "hypoco/parallel.hpp"
#include "hypoco/stats.hpp"
#include "hypoco/bounds.hpp"
#include "hypoco/potential.hpp"
#include "hypoco/measure.hpp"
#include "hypoco/processes.hpp"
#include "hypoco/montecarlo.hpp"
#include "hypoco/grid.hpp"
#include "hypoco/expmv.hpp"
#include "hypoco/dms.hpp"
#include "hypoco/dirichlet.hpp"
#include "hypoco/assumptions.hpp"
#include "hypoco/io.hpp"
