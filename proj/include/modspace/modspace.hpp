#pragma once

#include "modspace/error.hpp"
#include "modspace/grid.hpp"
#include "modspace/fft.hpp"
#include "modspace/field.hpp"
#include "modspace/window.hpp"
#include "modspace/modulation.hpp"
#include "modspace/classify.hpp"
#include "modspace/propagator.hpp"
#include "modspace/quadrature.hpp"
#include "modspace/solver.hpp"
#include "modspace/fit.hpp"
#include "modspace/parallel.hpp"
#include "modspace/probes.hpp"
#include "modspace/io.hpp"

namespace modspace {
inline constexpr const char* kVersion = "0.1.0";
}
