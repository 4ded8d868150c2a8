#pragma once

#include "qgame/amplitude.hpp"
#include "qgame/derivation.hpp"
#include "qgame/equivalence.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/generalized_permutation.hpp"
#include "qgame/inference.hpp"
#include "qgame/probability.hpp"
#include "qgame/rational.hpp"
#include "qgame/trace.hpp"
#include "qgame/value_function.hpp"
#include "qgame/vnm.hpp"
