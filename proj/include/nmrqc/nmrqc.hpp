#pragma once

// Umbrella header: dense complex algebra and quantum states, the
// transition-selective pulse algebra, the ideal gate library, the
// gate-to-pulse compiler, and the algorithm drivers.

#include "nmrqc/algorithms.hpp"
#include "nmrqc/gates.hpp"
#include "nmrqc/json_io.hpp"
#include "nmrqc/pulse.hpp"
#include "nmrqc/qstate.hpp"
#include "nmrqc/synth.hpp"
#include "nmrqc/textio.hpp"
