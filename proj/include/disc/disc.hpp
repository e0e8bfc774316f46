#pragma once

#include "disc/balancing.hpp"
#include "disc/bodies.hpp"
#include "disc/errors.hpp"
#include "disc/full_coloring.hpp"
#include "disc/gaussian.hpp"
#include "disc/io.hpp"
#include "disc/linalg.hpp"
#include "disc/partial_coloring.hpp"
#include "disc/projection.hpp"
#include "disc/rng.hpp"
#include "disc/version.hpp"

namespace disc {}
