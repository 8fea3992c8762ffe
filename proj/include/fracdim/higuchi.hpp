#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracdim/errors.hpp"
#include "fracdim/loglog.hpp"
#include "fracdim/time_series.hpp"

namespace fracdim {

// Default ceiling for the automatic scale schedule. Caps chosen near the
// signal length lean on sparsely populated subseries and bias tonal
// signals well above dimension 1; 16 keeps the estimate inside the
// validation tolerances at audio rates while leaving enough scales for a
// stable fit.
inline constexpr std::size_t kDefaultKMaxCap = 16;

struct HiguchiConfig {
    // Largest scale considered. 0 means automatic:
    // min(floor((N-1)/2), kDefaultKMaxCap) for an N-sample window.
    std::size_t k_max = 0;
    // Explicit scale schedule (strictly increasing). Empty means the
    // default: 1..10 stepwise, then geometric with ratio 1.3 up to k_max.
    std::vector<std::size_t> k_schedule;
};

// Largest scale with at least two strides available from every offset.
inline std::size_t max_scale_for(std::size_t n) {
    return (n >= 3) ? (n - 1) / 2 : 0;
}

// 1..10 stepwise, then k <- max(k+1, round(1.3 k)) while k <= k_max.
// Small scales are dense because every one adds information; past 10 the
// curve lengths change slowly, so geometric spacing keeps the fit cheap
// without starving it of points.
inline std::vector<std::size_t> default_schedule(std::size_t k_max) {
    if (k_max < 1)
        throw std::invalid_argument("k_max must be at least 1");
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= k_max && k <= 10; ++k)
        ks.push_back(k);
    std::size_t k = ks.back();
    while (true) {
        const auto stepped = static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * 1.3));
        k = std::max(k + 1, stepped);
        if (k > k_max) break;
        ks.push_back(k);
    }
    return ks;
}

namespace detail {

inline double curve_length_unchecked(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    double total = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        const std::size_t steps = (n - 1 - m) / k; // strides available from offset m
        if (steps == 0) continue;
        double abs_sum = 0.0;
        std::size_t idx = m;
        double prev = x[idx];
        for (std::size_t i = 0; i < steps; ++i) {
            idx += k;
            const double cur = x[idx];
            abs_sum += std::abs(cur - prev);
            prev = cur;
        }
        // Normalize by the fraction of the series the strided walk covers,
        // then by the stride itself.
        total += abs_sum * static_cast<double>(n - 1) /
                 (static_cast<double>(steps) * static_cast<double>(k) * static_cast<double>(k));
    }
    return total / static_cast<double>(k);
}

} // namespace detail

// Mean normalized curve length at stride k, averaged over all k offsets.
inline double curve_length_at_scale(const TimeSeries& ts, std::size_t k) {
    validate_series(ts);
    if (k < 1 || k > max_scale_for(ts.samples.size()))
        throw std::invalid_argument("scale k must satisfy 1 <= k <= (N-1)/2");
    return detail::curve_length_unchecked(ts.samples, k);
}

// Resolves the scale schedule an estimate would use for an n-sample series.
inline std::vector<std::size_t> resolve_schedule(std::size_t n, const HiguchiConfig& cfg) {
    const std::size_t feasible = max_scale_for(n);
    if (feasible < 2)
        throw std::invalid_argument("series too short: need at least 5 samples");

    if (!cfg.k_schedule.empty()) {
        if (cfg.k_schedule.size() < 2)
            throw std::invalid_argument("scale schedule needs at least 2 scales");
        std::size_t prev = 0;
        for (std::size_t k : cfg.k_schedule) {
            if (k < 1 || k <= prev)
                throw std::invalid_argument("scale schedule must be strictly increasing and >= 1");
            prev = k;
        }
        if (cfg.k_max != 0 && cfg.k_schedule.back() > cfg.k_max)
            throw std::invalid_argument("scale schedule exceeds k_max");
        if (cfg.k_schedule.back() > feasible)
            throw std::invalid_argument("scale schedule exceeds (N-1)/2 for this series");
        return cfg.k_schedule;
    }

    std::size_t k_max = cfg.k_max;
    if (k_max == 0) {
        k_max = std::min(feasible, kDefaultKMaxCap);
    } else {
        if (k_max < 2)
            throw std::invalid_argument("k_max must be at least 2");
        if (k_max > feasible)
            throw std::invalid_argument("k_max exceeds (N-1)/2 for this series");
    }
    return default_schedule(k_max);
}

// Higuchi dimension estimate: least-squares slope of ln L(k) vs ln k,
// negated. Scales whose curve length is zero (flat subsampling) are
// dropped and counted in excluded_count.
inline DimensionEstimate higuchi_dimension(const TimeSeries& ts,
                                           const HiguchiConfig& cfg = {}) {
    validate_series(ts);
    const auto schedule = resolve_schedule(ts.samples.size(), cfg);

    DimensionEstimate est;
    for (std::size_t k : schedule) {
        const double length = detail::curve_length_unchecked(ts.samples, k);
        if (length > 0.0)
            est.points.push_back({static_cast<double>(k), length});
        else
            ++est.excluded_count;
    }
    if (est.points.size() < 2)
        throw EstimationError("signal is too flat: fewer than 2 scales with nonzero curve length");

    const LineFit fit = fit_loglog(est.points);
    est.dimension = -fit.slope;
    est.slope = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    return est;
}

} // namespace fracdim
