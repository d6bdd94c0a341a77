// Convenience umbrella for the dgvm library.
#pragma once

#include "dgvm/basis.hpp"
#include "dgvm/benchmarks.hpp"
#include "dgvm/config.hpp"
#include "dgvm/diagnostics.hpp"
#include "dgvm/field.hpp"
#include "dgvm/integrator.hpp"
#include "dgvm/mesh.hpp"
#include "dgvm/quadrature.hpp"
#include "dgvm/rhs.hpp"
#include "dgvm/siac.hpp"
#include "dgvm/snapshot.hpp"
