#pragma once

#include "ugbound/error.hpp"
#include "ugbound/exact.hpp"
#include "ugbound/geometry.hpp"
#include "ugbound/instance.hpp"
#include "ugbound/randomized.hpp"
#include "ugbound/relaxation.hpp"
#include "ugbound/rng.hpp"
