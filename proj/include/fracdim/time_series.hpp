#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracdim {

// Uniformly sampled real-valued signal. sample_rate is in Hz; analysis
// code treats the series as dimensionless, the rate only matters for
// windowing and reporting offsets in seconds.
struct TimeSeries {
    std::vector<double> samples;
    double sample_rate = 1.0;
};

inline void validate_series(const TimeSeries& ts) {
    if (ts.samples.size() < 2)
        throw std::invalid_argument("time series needs at least 2 samples");
    if (!(ts.sample_rate > 0.0) || !std::isfinite(ts.sample_rate))
        throw std::invalid_argument("sample rate must be positive and finite");
    for (double v : ts.samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("time series contains a non-finite sample");
}

} // namespace fracdim
