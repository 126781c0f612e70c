#pragma once

#include "chemflow/chemo.hpp"
#include "chemflow/config.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/fluid.hpp"
#include "chemflow/functionals.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/operators.hpp"
#include "chemflow/oracles.hpp"
#include "chemflow/runner.hpp"
#include "chemflow/solver.hpp"
