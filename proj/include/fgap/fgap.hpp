#pragma once

#include "fgap/admissible.hpp"
#include "fgap/charge.hpp"
#include "fgap/contour.hpp"
#include "fgap/core.hpp"
#include "fgap/deformation.hpp"
#include "fgap/homology.hpp"
#include "fgap/periods.hpp"
#include "fgap/quadrature.hpp"
#include "fgap/solution.hpp"
#include "fgap/spectral_curve.hpp"
#include "fgap/theta.hpp"
