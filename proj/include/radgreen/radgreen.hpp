#pragma once

#include "radgreen/error.hpp"
#include "radgreen/grid.hpp"
#include "radgreen/potential.hpp"
#include "radgreen/profile.hpp"
#include "radgreen/quadrature.hpp"
#include "radgreen/ode.hpp"
#include "radgreen/green.hpp"
#include "radgreen/landscape.hpp"
#include "radgreen/fem.hpp"
#include "radgreen/minimizer.hpp"
#include "radgreen/shooting.hpp"
#include "radgreen/io.hpp"
#include "radgreen/config.hpp"
#include "radgreen/acceptance.hpp"
