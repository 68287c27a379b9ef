#pragma once

#include "triwave/config.hpp"
#include "triwave/error.hpp"
#include "triwave/fiber.hpp"
#include "triwave/field_io.hpp"
#include "triwave/grid.hpp"
#include "triwave/nehari.hpp"
#include "triwave/potential.hpp"
#include "triwave/runner.hpp"
#include "triwave/solver.hpp"
#include "triwave/system.hpp"
#include "triwave/threshold.hpp"
