#pragma once

#include "thinfilm/bounds.hpp"
#include "thinfilm/design.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/formulation.hpp"
#include "thinfilm/heuristics.hpp"
#include "thinfilm/materials.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/optics.hpp"
#include "thinfilm/relax.hpp"
#include "thinfilm/serialize.hpp"
#include "thinfilm/solver.hpp"
