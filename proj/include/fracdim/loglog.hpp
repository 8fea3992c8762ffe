#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracdim/errors.hpp"

namespace fracdim {

struct LogLogPoint {
    double scale;   // k for curve lengths, box size for counts
    double measure; // L(k) or N(box)

    bool operator==(const LogLogPoint&) const = default;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;

    bool operator==(const LineFit&) const = default;
};

// Result of a dimension estimate: the fit in ln/ln space plus the points
// that went into it, so callers can plot or audit the regression.
struct DimensionEstimate {
    double dimension = 0.0; // -slope
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
    std::vector<LogLogPoint> points; // the points actually fitted (positive measures)
    std::size_t excluded_count = 0;  // zero-measure points dropped before fitting

    bool operator==(const DimensionEstimate&) const = default;
};

// Least-squares line through (ln scale, ln measure). Scales and measures
// must be positive and finite; at least two distinct scales are required.
inline LineFit fit_loglog(std::span<const LogLogPoint> pts) {
    if (pts.size() < 2)
        throw EstimationError("log-log fit needs at least 2 points");

    std::vector<double> xs(pts.size()), ys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!std::isfinite(p.scale) || !std::isfinite(p.measure))
            throw std::invalid_argument("log-log point is not finite");
        if (!(p.scale > 0.0) || !(p.measure > 0.0))
            throw std::invalid_argument("log-log points must have positive scale and measure");
        xs[i] = std::log(p.scale);
        ys[i] = std::log(p.measure);
    }

    const double n = static_cast<double>(pts.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = xs[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (ys[i] - mean_y);
    }
    if (sxx == 0.0)
        throw EstimationError("log-log fit needs at least 2 distinct scales");

    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
        const double dy = ys[i] - mean_y;
        ss_res += resid * resid;
        ss_tot += dy * dy;
    }
    // All-equal measures fit a horizontal line exactly.
    fit.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    return fit;
}

} // namespace fracdim
