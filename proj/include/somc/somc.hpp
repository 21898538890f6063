// somc.hpp — umbrella include

#pragma once

#include "somc/error.hpp"
#include "somc/model.hpp"
#include "somc/bands.hpp"
#include "somc/greens.hpp"
#include "somc/boundstate.hpp"
#include "somc/spins.hpp"
#include "somc/dynamics.hpp"
#include "somc/disorder.hpp"
