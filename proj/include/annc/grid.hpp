#ifndef ANNC_GRID_HPP
#define ANNC_GRID_HPP

#include "annc/geometry.hpp"
#include "annc/lattice.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace annc {

/// Uniform grid anchored at the origin. The edge length follows from the
/// approximation parameters:
///   p = inf:  edge = eps * r / sqrt(d)
///   finite p: edge = eps * r / ((2 * m_norm)^(1/p) * sqrt(d))
struct grid_spec {
    double edge = 1.0;
    double epsilon = 1.0;
    double r = 1.0;
    std::size_t dim = 1;
    std::size_t m_norm = 1;
    metric p = metric::dfd();

    static grid_spec make(double epsilon, double r, std::size_t dim, std::size_t m_norm,
                          const metric& p);

    /// A grid with an explicit edge length; the derivation parameters are informational.
    static grid_spec with_edge(double edge, std::size_t dim, const metric& p = metric::dfd());
};

/// Largest |x| / edge accepted when snapping.
inline constexpr double max_lattice_magnitude = 4611686018427387904.0; // 2^62

/// Nearest grid point, rounding ties toward +infinity per coordinate.
lattice_point snap(std::span<const double> x, const grid_spec& grid);
lattice_curve_key snap_curve(curve_view c, const grid_spec& grid);

std::vector<double> physical(std::span<const lattice_coord> z, const grid_spec& grid);
std::vector<double> physical(const lattice_curve_key& key, const grid_spec& grid);

/// All grid points within Euclidean distance `radius` of `center` (closed
/// ball), in lexicographic order.
std::vector<lattice_point> grid_points_in_ball(std::span<const double> center, double radius,
                                               const grid_spec& grid);

/// Volume of the d-dimensional Euclidean ball of the given radius.
double ball_volume(std::size_t d, double radius);

/// Upper bound on the number of lattice points in a Euclidean ball of radius
/// `radius_in_edges` (measured in grid edges): V(radius + sqrt(d)).
double lattice_count_bound(std::size_t d, double radius_in_edges);

} // namespace annc

#endif // ANNC_GRID_HPP
