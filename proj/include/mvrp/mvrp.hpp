#pragma once

#include "mvrp/correspondence.hpp"
#include "mvrp/detectors.hpp"
#include "mvrp/errors.hpp"
#include "mvrp/geometry.hpp"
#include "mvrp/harness.hpp"
#include "mvrp/image.hpp"
#include "mvrp/rng.hpp"
#include "mvrp/scenegen.hpp"
#include "mvrp/solver.hpp"
