#pragma once

#include "linrk/builtin.hpp"
#include "linrk/convergence.hpp"
#include "linrk/errors.hpp"
#include "linrk/extrapolation.hpp"
#include "linrk/jacobian.hpp"
#include "linrk/linsolve.hpp"
#include "linrk/onestep.hpp"
#include "linrk/problem.hpp"
#include "linrk/stability.hpp"
#include "linrk/tableau.hpp"
#include "linrk/tableau_io.hpp"
#include "linrk/twostep.hpp"
#include "linrk/types.hpp"
