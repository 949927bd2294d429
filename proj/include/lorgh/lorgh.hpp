#pragma once

#include "lorgh/cauchy.hpp"
#include "lorgh/core.hpp"
#include "lorgh/error.hpp"
#include "lorgh/gh.hpp"
#include "lorgh/io.hpp"
#include "lorgh/matrix.hpp"
#include "lorgh/mcs.hpp"
#include "lorgh/models.hpp"
#include "lorgh/orderdim.hpp"
#include "lorgh/parallel.hpp"
#include "lorgh/pom.hpp"
#include "lorgh/rng.hpp"
#include "lorgh/tolerances.hpp"
#include "lorgh/experiments.hpp"
