#pragma once

#include "rgglab/analytic.hpp"
#include "rgglab/census.hpp"
#include "rgglab/geometry.hpp"
#include "rgglab/harness.hpp"
#include "rgglab/process.hpp"
#include "rgglab/random.hpp"
#include "rgglab/report.hpp"
#include "rgglab/rgg.hpp"
#include "rgglab/stats.hpp"
