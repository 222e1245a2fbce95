#pragma once

// Everything in one include.
#include "london/conditioning.hpp"
#include "london/debye.hpp"
#include "london/errors.hpp"
#include "london/fields.hpp"
#include "london/layerops.hpp"
#include "london/quadrature.hpp"
#include "london/specfun.hpp"
#include "london/sphgrid.hpp"
#include "london/vec.hpp"
#include "london/verify.hpp"
