#pragma once

#include "pathlyap/counterexample.hpp"
#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/invariant.hpp"
#include "pathlyap/io.hpp"
#include "pathlyap/linalg.hpp"
#include "pathlyap/lyapunov.hpp"
#include "pathlyap/path_complete.hpp"
#include "pathlyap/reduction.hpp"
#include "pathlyap/solver.hpp"
