#pragma once

#include "irqbench/analysis.hpp"
#include "irqbench/error.hpp"
#include "irqbench/gic.hpp"
#include "irqbench/platform.hpp"
#include "irqbench/rng.hpp"
#include "irqbench/scenarios.hpp"
#include "irqbench/stimulus.hpp"
#include "irqbench/timing.hpp"
#include "irqbench/trace.hpp"
#include "irqbench/units.hpp"
#include "irqbench/bench.hpp"
