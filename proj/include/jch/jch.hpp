// jch.hpp: umbrella header for the physics modules (the CLI layer lives in jch/cli/).

#pragma once

#include "jch/hilbert.hpp"
#include "jch/model.hpp"
#include "jch/eigensolve.hpp"
#include "jch/quantum_info.hpp"
#include "jch/parallel.hpp"
#include "jch/meanfield.hpp"
#include "jch/stats.hpp"
#include "jch/disorder.hpp"
#include "jch/smft.hpp"
