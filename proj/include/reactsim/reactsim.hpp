#pragma once

// Umbrella header for the interval-parameterized jump-diffusion reaction
// toolkit: interval arithmetic, the finite jump measure, closed-form
// thresholds, the path integrator, Monte Carlo verification, and the CLI
// front-end pieces.

#include "reactsim/interval.hpp"
#include "reactsim/rng.hpp"
#include "reactsim/jump_measure.hpp"
#include "reactsim/thresholds.hpp"
#include "reactsim/sde_engine.hpp"
#include "reactsim/mc_analysis.hpp"
#include "reactsim/config.hpp"
#include "reactsim/csv.hpp"
#include "reactsim/cli.hpp"
