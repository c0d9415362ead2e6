#pragma once

// Two-level atom in a plane travelling wave: closed-form dressed-state
// evolution of momentum-space wave packets, per-level observables, and the
// scenario front end.

#include "camel/grid.hpp"
#include "camel/observables.hpp"
#include "camel/oracle.hpp"
#include "camel/propagator.hpp"
#include "camel/runner.hpp"
#include "camel/scenario.hpp"
#include "camel/state.hpp"
#include "camel/units.hpp"
