#pragma once

#include "commutators.hpp"
#include "discrete.hpp"
#include "dyadic.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "schrodinger.hpp"
#include "semilinear.hpp"
#include "suites.hpp"
#include "cli.hpp"
