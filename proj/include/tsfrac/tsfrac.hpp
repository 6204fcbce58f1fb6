#pragma once

#include "tsfrac/calculus.hpp"
#include "tsfrac/chain.hpp"
#include "tsfrac/error.hpp"
#include "tsfrac/expr.hpp"
#include "tsfrac/fn.hpp"
#include "tsfrac/inequalities.hpp"
#include "tsfrac/quadrature.hpp"
#include "tsfrac/timescale.hpp"
