#pragma once

#include "kgw/combinatorics.hpp"
#include "kgw/errors.hpp"
#include "kgw/gss_stability.hpp"
#include "kgw/hill_spectrum.hpp"
#include "kgw/io.hpp"
#include "kgw/pde_evolution.hpp"
#include "kgw/potential.hpp"
#include "kgw/quadrature.hpp"
#include "kgw/spectral.hpp"
#include "kgw/wave_family.hpp"
