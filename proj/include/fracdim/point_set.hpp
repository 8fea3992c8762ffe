#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "fracdim/errors.hpp"
#include "fracdim/loglog.hpp"

namespace fracdim {

// Points within this fraction of a box size below a cell edge are counted
// in the upper cell. Grid edges frequently coincide with constructed
// coordinates (thirds, powers of two), where bare floor() would split a
// cluster across cells depending on rounding direction.
inline constexpr double kBoxEdgeTolerance = 1e-9;

// Default box sweep: this many geometric steps between extent/kBoxSweep*
// fractions of the bounding-box extent.
inline constexpr std::size_t kBoxSweepSteps = 12;
inline constexpr double kBoxSweepCoarsest = 1.0 / 4.0;
inline constexpr double kBoxSweepFinest = 1.0 / 512.0;

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2D&) const = default;
};

struct PointSet2D {
    std::vector<Point2D> points;
};

struct Bounds2D {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double extent() const { return std::max(width(), height()); }
};

inline void validate_point_set(const PointSet2D& set) {
    if (set.points.empty())
        throw std::invalid_argument("point set is empty");
    for (const auto& p : set.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("point set contains a non-finite coordinate");
}

inline Bounds2D bounds_of(const PointSet2D& set) {
    validate_point_set(set);
    Bounds2D b{set.points[0].x, set.points[0].y, set.points[0].x, set.points[0].y};
    for (const auto& p : set.points) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

// Number of occupied cells in a grid of the given box size anchored at the
// bounding-box min corner. Cells are half-open; see kBoxEdgeTolerance for
// the edge rule.
inline std::size_t count_boxes(const PointSet2D& set, double box_size) {
    validate_point_set(set);
    if (!(box_size > 0.0) || !std::isfinite(box_size))
        throw std::invalid_argument("box size must be positive and finite");
    const Bounds2D b = bounds_of(set);
    if (b.extent() / box_size > 2147483646.0)
        throw std::invalid_argument("box size is too small for the set's extent");

    std::unordered_set<std::uint64_t> cells;
    cells.reserve(set.points.size());
    for (const auto& p : set.points) {
        const auto ix = static_cast<std::uint64_t>(
            std::floor((p.x - b.min_x) / box_size + kBoxEdgeTolerance));
        const auto iy = static_cast<std::uint64_t>(
            std::floor((p.y - b.min_y) / box_size + kBoxEdgeTolerance));
        cells.insert((ix << 32) | iy);
    }
    return cells.size();
}

// Geometric sweep of kBoxSweepSteps sizes from extent/4 down to extent/512.
inline std::vector<double> default_box_sizes(const PointSet2D& set) {
    const Bounds2D b = bounds_of(set);
    const double extent = b.extent();
    if (!(extent > 0.0))
        throw std::invalid_argument("point set is degenerate: zero extent");
    std::vector<double> sizes(kBoxSweepSteps);
    const double coarsest = extent * kBoxSweepCoarsest;
    const double ratio = std::pow(kBoxSweepFinest / kBoxSweepCoarsest,
                                  1.0 / static_cast<double>(kBoxSweepSteps - 1));
    for (std::size_t i = 0; i < kBoxSweepSteps; ++i)
        sizes[i] = coarsest * std::pow(ratio, static_cast<double>(i));
    return sizes;
}

// Box-counting dimension: least-squares slope of ln N(s) vs ln s, negated.
// Sizes must be strictly decreasing and positive.
inline DimensionEstimate box_dimension(const PointSet2D& set,
                                       std::span<const double> box_sizes) {
    validate_point_set(set);
    if (box_sizes.size() < 2)
        throw std::invalid_argument("need at least 2 box sizes");
    for (std::size_t i = 0; i < box_sizes.size(); ++i) {
        if (!(box_sizes[i] > 0.0) || !std::isfinite(box_sizes[i]))
            throw std::invalid_argument("box sizes must be positive and finite");
        if (i > 0 && !(box_sizes[i] < box_sizes[i - 1]))
            throw std::invalid_argument("box sizes must be strictly decreasing");
    }

    DimensionEstimate est;
    bool counts_vary = false;
    std::size_t first_count = 0;
    for (std::size_t i = 0; i < box_sizes.size(); ++i) {
        const std::size_t count = count_boxes(set, box_sizes[i]);
        if (i == 0)
            first_count = count;
        else if (count != first_count)
            counts_vary = true;
        est.points.push_back({box_sizes[i], static_cast<double>(count)});
    }
    if (!counts_vary)
        throw EstimationError("box counts do not vary across the sweep; "
                              "sizes are too coarse or the set is degenerate");

    const LineFit fit = fit_loglog(est.points);
    est.dimension = -fit.slope;
    est.slope = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    return est;
}

inline DimensionEstimate box_dimension(const PointSet2D& set) {
    const auto sizes = default_box_sizes(set);
    return box_dimension(set, sizes);
}

// Text form: one "x,y" pair per line. '#' lines and blank lines are
// ignored on read.
inline void write_points_text(std::ostream& out, const PointSet2D& set) {
    out.precision(17);
    for (const auto& p : set.points)
        out << p.x << ',' << p.y << '\n';
}

inline PointSet2D read_points_text(std::istream& in) {
    PointSet2D set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#')
            continue;
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
            throw std::invalid_argument("point file line " + std::to_string(line_no) +
                                        ": expected 'x,y'");
        try {
            std::size_t used = 0;
            const std::string xs = line.substr(start, comma - start);
            const std::string ys = line.substr(comma + 1);
            const double x = std::stod(xs, &used);
            const double y = std::stod(ys);
            (void)used;
            set.points.push_back({x, y});
        } catch (const std::exception&) {
            throw std::invalid_argument("point file line " + std::to_string(line_no) +
                                        ": malformed number");
        }
    }
    return set;
}

} // namespace fracdim
