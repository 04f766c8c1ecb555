#pragma once

// Umbrella header.

#include "robinstab/ball_spectrum.hpp"
#include "robinstab/eigensolver.hpp"
#include "robinstab/errors.hpp"
#include "robinstab/experiments.hpp"
#include "robinstab/fem.hpp"
#include "robinstab/geometry.hpp"
#include "robinstab/mesh.hpp"
#include "robinstab/quadrature.hpp"
#include "robinstab/special.hpp"
#include "robinstab/stability.hpp"
