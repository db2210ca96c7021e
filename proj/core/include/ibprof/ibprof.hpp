#pragma once

#include "ibprof/assort.hpp"
#include "ibprof/collapse.hpp"
#include "ibprof/error.hpp"
#include "ibprof/genlab.hpp"
#include "ibprof/graph.hpp"
#include "ibprof/rng.hpp"
#include "ibprof/sis.hpp"
#include "ibprof/spectral.hpp"
#include "ibprof/stratify.hpp"
