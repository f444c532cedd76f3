#pragma once

#include "modfix/error.hpp"
#include "modfix/scalar.hpp"
#include "modfix/point.hpp"
#include "modfix/modular.hpp"
#include "modfix/graph.hpp"
#include "modfix/contraction.hpp"
#include "modfix/solver.hpp"
#include "modfix/expr.hpp"
#include "modfix/sampling.hpp"
#include "modfix/config.hpp"
#include "modfix/experiment.hpp"
#include "modfix/repro.hpp"
