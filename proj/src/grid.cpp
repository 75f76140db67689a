#include "annc/grid.hpp"

#include "annc/errors.hpp"

#include <cmath>
#include <numbers>

namespace annc {

grid_spec grid_spec::make(double epsilon, double r, std::size_t dim, std::size_t m_norm,
                          const metric& p) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw config_error("epsilon must lie in (0, 1]");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw config_error("radius r must be positive and finite");
    }
    if (dim == 0 || m_norm == 0) {
        throw config_error("grid dimension and length normalizer must be positive");
    }
    grid_spec g;
    g.epsilon = epsilon;
    g.r = r;
    g.dim = dim;
    g.m_norm = m_norm;
    g.p = p;
    const double root_d = std::sqrt(static_cast<double>(dim));
    if (p.is_dfd()) {
        g.edge = epsilon * r / root_d;
    } else {
        g.edge = epsilon * r / (std::pow(2.0 * static_cast<double>(m_norm), 1.0 / p.p()) * root_d);
    }
    return g;
}

grid_spec grid_spec::with_edge(double edge, std::size_t dim, const metric& p) {
    if (!(edge > 0.0) || !std::isfinite(edge)) {
        throw config_error("grid edge must be positive and finite");
    }
    if (dim == 0) {
        throw config_error("grid dimension must be positive");
    }
    grid_spec g;
    g.edge = edge;
    g.dim = dim;
    g.p = p;
    return g;
}

lattice_point snap(std::span<const double> x, const grid_spec& grid) {
    require_same_dim(x.size(), grid.dim, "snap");
    lattice_point z;
    z.coords.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] / grid.edge;
        if (!(std::abs(u) < max_lattice_magnitude)) {
            throw capacity_error("coordinate exceeds the lattice range (edge * 2^62)");
        }
        z.coords[i] = static_cast<lattice_coord>(std::floor(u + 0.5));
    }
    return z;
}

lattice_curve_key snap_curve(curve_view c, const grid_spec& grid) {
    require_same_dim(c.dim, grid.dim, "snap_curve");
    lattice_curve_key key;
    key.dim = c.dim;
    key.cells.reserve(c.coords.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto z = snap(c.vertex(i), grid);
        key.cells.insert(key.cells.end(), z.coords.begin(), z.coords.end());
    }
    return key;
}

std::vector<double> physical(std::span<const lattice_coord> z, const grid_spec& grid) {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        x[i] = static_cast<double>(z[i]) * grid.edge;
    }
    return x;
}

std::vector<double> physical(const lattice_curve_key& key, const grid_spec& grid) {
    return physical(std::span<const lattice_coord>(key.cells), grid);
}

std::vector<lattice_point> grid_points_in_ball(std::span<const double> center, double radius,
                                               const grid_spec& grid) {
    require_same_dim(center.size(), grid.dim, "grid_points_in_ball");
    if (!(radius >= 0.0)) {
        throw config_error("ball radius must be non-negative");
    }
    const std::size_t d = grid.dim;
    std::vector<lattice_coord> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double a = (center[i] - radius) / grid.edge;
        const double b = (center[i] + radius) / grid.edge;
        if (!(std::abs(a) < max_lattice_magnitude && std::abs(b) < max_lattice_magnitude)) {
            throw capacity_error("ball exceeds the lattice range (edge * 2^62)");
        }
        // One cell of slack on each side; the exact filter below decides.
        lo[i] = static_cast<lattice_coord>(std::ceil(a)) - 1;
        hi[i] = static_cast<lattice_coord>(std::floor(b)) + 1;
    }

    std::vector<lattice_point> out;
    std::vector<lattice_coord> z(lo);
    std::vector<double> x(d);
    while (true) {
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = static_cast<double>(z[i]) * grid.edge;
        }
        if (euclidean_distance(x, center) <= radius) {
            out.push_back(lattice_point{z});
        }
        // odometer, last coordinate fastest, so output is lexicographic
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (z[i] < hi[i]) {
                ++z[i];
                break;
            }
            z[i] = lo[i];
            if (i == 0) {
                return out;
            }
        }
    }
}

double ball_volume(std::size_t d, double radius) {
    const double half = static_cast<double>(d) / 2.0;
    return std::pow(std::numbers::pi, half) / std::tgamma(1.0 + half) *
           std::pow(radius, static_cast<double>(d));
}

double lattice_count_bound(std::size_t d, double radius_in_edges) {
    return ball_volume(d, radius_in_edges + std::sqrt(static_cast<double>(d)));
}

} // namespace annc
