#pragma once

// Umbrella header.

#include "cascadia/automaton.hpp"
#include "cascadia/cascade.hpp"
#include "cascadia/composition.hpp"
#include "cascadia/delay_line.hpp"
#include "cascadia/engine.hpp"
#include "cascadia/errors.hpp"
#include "cascadia/junction.hpp"
#include "cascadia/log.hpp"
#include "cascadia/models.hpp"
#include "cascadia/noise.hpp"
#include "cascadia/profile.hpp"
#include "cascadia/scenario.hpp"
#include "cascadia/trace.hpp"
#include "cascadia/value_map.hpp"
