// Umbrella header.
#pragma once

#include "tpfe/multi_index.hpp"
#include "tpfe/polybasis.hpp"
#include "tpfe/linalg.hpp"
#include "tpfe/quadrature.hpp"
#include "tpfe/affine_map.hpp"
#include "tpfe/geometry.hpp"
#include "tpfe/field.hpp"
#include "tpfe/element_polynomial.hpp"
#include "tpfe/operators.hpp"
#include "tpfe/norms.hpp"
#include "tpfe/studies.hpp"
