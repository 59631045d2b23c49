#pragma once

#include "cubes/arith.hpp"
#include "cubes/rational.hpp"
#include "cubes/ntt.hpp"
#include "cubes/t_cache.hpp"
#include "cubes/exp_sums.hpp"
#include "cubes/singular_series.hpp"
#include "cubes/quadrature.hpp"
#include "cubes/weights.hpp"
#include "cubes/archimedean.hpp"
#include "cubes/lattice.hpp"
#include "cubes/variance.hpp"
#include "cubes/verify.hpp"
#include "cubes/report.hpp"
