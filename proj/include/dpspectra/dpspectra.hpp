#pragma once

#include "dpspectra/coherence.hpp"
#include "dpspectra/deflation.hpp"
#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/errors.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/lower_bound.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/matrix_market.hpp"
#include "dpspectra/power_iteration.hpp"
#include "dpspectra/privacy.hpp"
#include "dpspectra/rng.hpp"
#include "dpspectra/sensitivity_probe.hpp"
