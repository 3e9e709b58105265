#pragma once

#include "thimac/error.hpp"
#include "thimac/core_model.hpp"
#include "thimac/tmlang.hpp"
#include "thimac/dynamics.hpp"
#include "thimac/behavior.hpp"
#include "thimac/simulator.hpp"
#include "thimac/json_io.hpp"
#include "thimac/dot.hpp"
