#pragma once

// Stochastic Taylor expansions of functionals of SDE solutions, organized by
// colored rooted trees, with exact combinatorics and a Monte Carlo harness
// for verifying truncation-error orders.

#include "stochtree/convergence.hpp"
#include "stochtree/elementary.hpp"
#include "stochtree/enumerate.hpp"
#include "stochtree/expansion.hpp"
#include "stochtree/gbm.hpp"
#include "stochtree/half_int.hpp"
#include "stochtree/hierarchical.hpp"
#include "stochtree/json_io.hpp"
#include "stochtree/labelled_tree.hpp"
#include "stochtree/operators.hpp"
#include "stochtree/philox.hpp"
#include "stochtree/polynomial.hpp"
#include "stochtree/rational.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/tree.hpp"
#include "stochtree/wiener.hpp"
#include "stochtree/word.hpp"
