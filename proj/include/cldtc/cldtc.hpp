#pragma once

#include "cldtc/spin.hpp"
#include "cldtc/rng.hpp"
#include "cldtc/sampling.hpp"
#include "cldtc/drive.hpp"
#include "cldtc/hamiltonian.hpp"
#include "cldtc/floquet.hpp"
#include "cldtc/effective.hpp"
#include "cldtc/ode_oracle.hpp"
#include "cldtc/observables.hpp"
#include "cldtc/spectral.hpp"
#include "cldtc/stats.hpp"
#include "cldtc/parallel.hpp"
#include "cldtc/ensemble.hpp"
#include "cldtc/experiments.hpp"
#include "cldtc/config.hpp"
#include "cldtc/bundle.hpp"
#include "cldtc/cli.hpp"
