#pragma once

#include "chirprange/config.hpp"
#include "chirprange/estimators.hpp"
#include "chirprange/experiments.hpp"
#include "chirprange/io.hpp"
#include "chirprange/power.hpp"
#include "chirprange/ranging.hpp"
#include "chirprange/results.hpp"
#include "chirprange/rng.hpp"
#include "chirprange/room.hpp"
#include "chirprange/signals.hpp"
#include "chirprange/stats.hpp"
#include "chirprange/svg.hpp"
#include "chirprange/waveform.hpp"
