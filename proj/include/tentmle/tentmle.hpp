#pragma once

#include "tentmle/duality.hpp"
#include "tentmle/errors.hpp"
#include "tentmle/exact.hpp"
#include "tentmle/experiments.hpp"
#include "tentmle/geometry.hpp"
#include "tentmle/hfunc.hpp"
#include "tentmle/io.hpp"
#include "tentmle/quadrature.hpp"
#include "tentmle/rng.hpp"
#include "tentmle/solver.hpp"
#include "tentmle/svg.hpp"
#include "tentmle/triangulations.hpp"
