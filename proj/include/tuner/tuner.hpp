#pragma once

#include "tuner/command_evaluator.hpp"
#include "tuner/crs.hpp"
#include "tuner/grid_search.hpp"
#include "tuner/param_space.hpp"
#include "tuner/presets.hpp"
#include "tuner/replay.hpp"
#include "tuner/run_log.hpp"
#include "tuner/space_io.hpp"
#include "tuner/synthetic.hpp"
