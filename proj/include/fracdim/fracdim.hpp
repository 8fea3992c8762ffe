#pragma once

// Fractal-dimension toolkit: Higuchi estimation for sampled waveforms,
// box counting for planar point sets, reference generators, WAV I/O, and
// a corpus analysis pipeline.

#include "fracdim/errors.hpp"
#include "fracdim/fractal_sets.hpp"
#include "fracdim/generators.hpp"
#include "fracdim/higuchi.hpp"
#include "fracdim/loglog.hpp"
#include "fracdim/pipeline.hpp"
#include "fracdim/point_set.hpp"
#include "fracdim/time_series.hpp"
#include "fracdim/wav.hpp"
#include "fracdim/windowing.hpp"

namespace fracdim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace fracdim
