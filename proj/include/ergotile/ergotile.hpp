#pragma once

#include "ergotile/cocycle.hpp"
#include "ergotile/generate.hpp"
#include "ergotile/markers.hpp"
#include "ergotile/measure.hpp"
#include "ergotile/periodic.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/simulate.hpp"
#include "ergotile/spec_io.hpp"
#include "ergotile/system.hpp"
#include "ergotile/tiling.hpp"
