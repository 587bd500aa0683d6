#pragma once

// Umbrella header: full pipeline from system parameters to output-state
// functionals and batch sweep drivers.

#include "levmir/errors.hpp"
#include "levmir/params.hpp"
#include "levmir/steady_state.hpp"
#include "levmir/linearization.hpp"
#include "levmir/spectra.hpp"
#include "levmir/gaussian_state.hpp"
#include "levmir/io.hpp"
#include "levmir/sweeps.hpp"
