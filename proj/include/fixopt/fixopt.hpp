#pragma once

#include "functions.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "operators.hpp"
#include "point.hpp"
#include "rng.hpp"
#include "samplers.hpp"
#include "schedules.hpp"
#include "solver.hpp"
