#pragma once

// Umbrella header: the whole simulation library.
//
// A two-qubit XXZ chain is driven by repeated collisions with pairs of
// thermally prepared flying qubits that may be correlated by an arbitrary
// unitary before each collision. The library computes the steady state of
// the collision channel, the full work/heat/entropy-production bookkeeping
// in the partial and complete accounting scenarios, correlation measures,
// Haar-random ensembles, and the structured permutation scan bounding them.

#include "correlations.hpp"
#include "dynamics.hpp"
#include "ensemble.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "thermo.hpp"
#include "tolerances.hpp"
