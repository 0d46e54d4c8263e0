#pragma once

// Umbrella header for the Nystrom-preconditioned solver toolkit.

#include "npcg/adaptive.hpp"
#include "npcg/bench.hpp"
#include "npcg/dense.hpp"
#include "npcg/diagnostics.hpp"
#include "npcg/matrix_io.hpp"
#include "npcg/nystrom.hpp"
#include "npcg/operators.hpp"
#include "npcg/preconditioner.hpp"
#include "npcg/random.hpp"
#include "npcg/solvers.hpp"
#include "npcg/types.hpp"
