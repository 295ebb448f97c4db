#pragma once

#include "standbyrel/criteria.hpp"
#include "standbyrel/curve.hpp"
#include "standbyrel/dists.hpp"
#include "standbyrel/errors.hpp"
#include "standbyrel/general_cold.hpp"
#include "standbyrel/laplace.hpp"
#include "standbyrel/markov.hpp"
#include "standbyrel/orders.hpp"
#include "standbyrel/quadrature.hpp"
#include "standbyrel/rng.hpp"
#include "standbyrel/sim.hpp"
