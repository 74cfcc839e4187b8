#pragma once

// impulse-mud: multiuser time-hopping impulse-radio detection toolkit

#include "imud/capacity.hpp"
#include "imud/channel.hpp"
#include "imud/code.hpp"
#include "imud/config.hpp"
#include "imud/detectors.hpp"
#include "imud/gf2.hpp"
#include "imud/graph.hpp"
#include "imud/rng.hpp"
#include "imud/sim.hpp"
