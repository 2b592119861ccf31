#pragma once

#include "momprob/config_space.hpp"
#include "momprob/errors.hpp"
#include "momprob/generators.hpp"
#include "momprob/io.hpp"
#include "momprob/lp.hpp"
#include "momprob/moment_algebra.hpp"
#include "momprob/poly_algebra.hpp"
#include "momprob/rational.hpp"
#include "momprob/realizability.hpp"
