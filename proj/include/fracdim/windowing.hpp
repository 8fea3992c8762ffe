#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracdim/time_series.hpp"

namespace fracdim {

// Sliding-window plan in seconds; sample counts are derived per series by
// rounding window_seconds * rate and hop_seconds * rate to the nearest
// integer.
struct WindowPlan {
    double window_seconds = 2.0;
    double hop_seconds = 1.0;
};

struct SeriesWindow {
    double offset_seconds = 0.0;
    TimeSeries series;
};

inline std::size_t window_samples_for(const WindowPlan& plan, double sample_rate) {
    if (!(plan.window_seconds > 0.0) || !std::isfinite(plan.window_seconds))
        throw std::invalid_argument("window length must be positive and finite");
    const double w = std::round(plan.window_seconds * sample_rate);
    if (w < 4.0)
        throw std::invalid_argument("window must cover at least 4 samples");
    if (w > 1e9)
        throw std::invalid_argument("window is unreasonably long");
    return static_cast<std::size_t>(w);
}

inline std::size_t hop_samples_for(const WindowPlan& plan, double sample_rate) {
    if (!(plan.hop_seconds > 0.0) || !std::isfinite(plan.hop_seconds))
        throw std::invalid_argument("hop must be positive and finite");
    if (plan.hop_seconds > plan.window_seconds)
        throw std::invalid_argument("hop must not exceed the window length");
    const double h = std::round(plan.hop_seconds * sample_rate);
    if (h < 1.0)
        throw std::invalid_argument("hop must cover at least 1 sample");
    return static_cast<std::size_t>(h);
}

// Splits a series into full windows starting at multiples of the hop; a
// trailing partial window is dropped. A series shorter than one window is
// an error.
inline std::vector<SeriesWindow> segment(const TimeSeries& ts, const WindowPlan& plan) {
    validate_series(ts);
    const std::size_t w = window_samples_for(plan, ts.sample_rate);
    const std::size_t h = hop_samples_for(plan, ts.sample_rate);
    const std::size_t n = ts.samples.size();
    if (n < w)
        throw std::invalid_argument("series is shorter than one window");

    std::vector<SeriesWindow> windows;
    for (std::size_t start = 0; start + w <= n; start += h) {
        SeriesWindow win;
        win.offset_seconds = static_cast<double>(start) / ts.sample_rate;
        win.series.sample_rate = ts.sample_rate;
        win.series.samples.assign(ts.samples.begin() + static_cast<std::ptrdiff_t>(start),
                                  ts.samples.begin() + static_cast<std::ptrdiff_t>(start + w));
        windows.push_back(std::move(win));
    }
    return windows;
}

} // namespace fracdim
