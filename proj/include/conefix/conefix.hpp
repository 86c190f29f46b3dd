#pragma once

#include "conefix/axioms.hpp"
#include "conefix/cone.hpp"
#include "conefix/contractions.hpp"
#include "conefix/errors.hpp"
#include "conefix/finite.hpp"
#include "conefix/generate.hpp"
#include "conefix/instances.hpp"
#include "conefix/maps.hpp"
#include "conefix/metric_space.hpp"
#include "conefix/numeric.hpp"
#include "conefix/solver.hpp"
#include "conefix/vector.hpp"
