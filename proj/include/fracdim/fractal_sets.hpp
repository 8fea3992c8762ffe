#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracdim/errors.hpp"
#include "fracdim/point_set.hpp"

namespace fracdim {

// Koch curve vertices after `level` refinements of the unit segment.
// level 0 is the segment's endpoints; each pass replaces every edge with
// four, so the result has 4^level + 1 points.
inline PointSet2D gen_koch(int level) {
    if (level < 0 || level > 10)
        throw std::invalid_argument("koch level must be in [0, 10]");
    const double s3h = std::sqrt(3.0) / 2.0;
    std::vector<Point2D> pts{{0.0, 0.0}, {1.0, 0.0}};
    for (int l = 0; l < level; ++l) {
        std::vector<Point2D> next;
        next.reserve((pts.size() - 1) * 4 + 1);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Point2D p = pts[i];
            const Point2D q = pts[i + 1];
            const double dx = (q.x - p.x) / 3.0;
            const double dy = (q.y - p.y) / 3.0;
            const Point2D a{p.x + dx, p.y + dy};
            const Point2D c{p.x + 2.0 * dx, p.y + 2.0 * dy};
            // Third vertex of the equilateral triangle erected on [a, c].
            const Point2D peak{a.x + 0.5 * dx - s3h * dy, a.y + s3h * dx + 0.5 * dy};
            next.push_back(p);
            next.push_back(a);
            next.push_back(peak);
            next.push_back(c);
        }
        next.push_back(pts.back());
        pts = std::move(next);
    }
    return {std::move(pts)};
}

// Cell centers of the level-n Sierpinski carpet in the unit square:
// 8^level points at ((cx + 0.5) / 3^level, (cy + 0.5) / 3^level).
inline PointSet2D gen_sierpinski_carpet(int level) {
    if (level < 1 || level > 6)
        throw std::invalid_argument("carpet level must be in [1, 6]");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells{{0, 0}};
    for (int l = 0; l < level; ++l) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> next;
        next.reserve(cells.size() * 8);
        for (const auto& [cx, cy] : cells)
            for (std::uint32_t dx = 0; dx < 3; ++dx)
                for (std::uint32_t dy = 0; dy < 3; ++dy) {
                    if (dx == 1 && dy == 1) continue;
                    next.emplace_back(cx * 3 + dx, cy * 3 + dy);
                }
        cells = std::move(next);
    }
    const double scale = std::pow(3.0, level);
    PointSet2D set;
    set.points.reserve(cells.size());
    for (const auto& [cx, cy] : cells)
        set.points.push_back({(cx + 0.5) / scale, (cy + 0.5) / scale});
    return set;
}

// per_side x per_side lattice {i/per_side} x {j/per_side}: a dimension-2
// reference set.
inline PointSet2D gen_filled_square(std::size_t per_side) {
    if (per_side < 2 || per_side > 4096)
        throw std::invalid_argument("per_side must be in [2, 4096]");
    PointSet2D set;
    set.points.reserve(per_side * per_side);
    const double inv = 1.0 / static_cast<double>(per_side);
    for (std::size_t i = 0; i < per_side; ++i)
        for (std::size_t j = 0; j < per_side; ++j)
            set.points.push_back({static_cast<double>(i) * inv,
                                  static_cast<double>(j) * inv});
    return set;
}

// count points {i/count} on the x-axis: a dimension-1 reference set.
inline PointSet2D gen_segment(std::size_t count) {
    if (count < 2 || count > 10000000)
        throw std::invalid_argument("count must be in [2, 1e7]");
    PointSet2D set;
    set.points.reserve(count);
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
        set.points.push_back({static_cast<double>(i) * inv, 0.0});
    return set;
}

struct JuliaParams {
    // Defaults are the Douady rabbit.
    double c_re = -0.123;
    double c_im = 0.745;
    std::size_t grid_resolution = 1024; // cells per axis over [-2, 2]^2
    std::size_t max_iter = 200;
    double escape_radius = 2.0;
};

// Escape-time boundary band of the filled Julia set for z -> z^2 + c.
// The [-2, 2]^2 square is sampled at cell centers; a cell belongs to the
// boundary when its escaped/bounded classification differs from a
// 4-neighbor's. Returns the centers of boundary cells.
inline PointSet2D gen_julia_boundary(const JuliaParams& p) {
    if (p.grid_resolution < 64 || p.grid_resolution > 8192)
        throw std::invalid_argument("grid resolution must be in [64, 8192]");
    if (p.max_iter < 50 || p.max_iter > 100000)
        throw std::invalid_argument("max_iter must be in [50, 100000]");
    if (!(p.escape_radius >= 2.0) || !std::isfinite(p.escape_radius))
        throw std::invalid_argument("escape radius must be finite and >= 2");
    if (!std::isfinite(p.c_re) || !std::isfinite(p.c_im))
        throw std::invalid_argument("c must be finite");

    const std::size_t res = p.grid_resolution;
    const double cell = 4.0 / static_cast<double>(res);
    const double r2 = p.escape_radius * p.escape_radius;

    std::vector<std::uint8_t> escaped(res * res, 0);
    for (std::size_t j = 0; j < res; ++j) {
        const double y = -2.0 + (static_cast<double>(j) + 0.5) * cell;
        for (std::size_t i = 0; i < res; ++i) {
            const double x = -2.0 + (static_cast<double>(i) + 0.5) * cell;
            double zr = x, zi = y;
            std::uint8_t esc = 0;
            for (std::size_t it = 0; it < p.max_iter; ++it) {
                const double zr2 = zr * zr;
                const double zi2 = zi * zi;
                zi = 2.0 * zr * zi + p.c_im;
                zr = zr2 - zi2 + p.c_re;
                if (zr * zr + zi * zi > r2) {
                    esc = 1;
                    break;
                }
            }
            escaped[j * res + i] = esc;
        }
    }

    PointSet2D set;
    for (std::size_t j = 0; j < res; ++j) {
        for (std::size_t i = 0; i < res; ++i) {
            const std::uint8_t own = escaped[j * res + i];
            const bool boundary =
                (i > 0 && escaped[j * res + i - 1] != own) ||
                (i + 1 < res && escaped[j * res + i + 1] != own) ||
                (j > 0 && escaped[(j - 1) * res + i] != own) ||
                (j + 1 < res && escaped[(j + 1) * res + i] != own);
            if (boundary)
                set.points.push_back({-2.0 + (static_cast<double>(i) + 0.5) * cell,
                                      -2.0 + (static_cast<double>(j) + 0.5) * cell});
        }
    }
    if (set.points.empty())
        throw EstimationError("Julia boundary is empty: every cell classifies the same way");
    return set;
}

} // namespace fracdim
