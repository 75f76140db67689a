#ifndef ANNC_SIMPLIFY_HPP
#define ANNC_SIMPLIFY_HPP

#include "annc/geometry.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace annc {

struct meb_result {
    point center;
    double radius = 0.0;
};

/// Enclosing ball within a factor (1 + eps) of the minimum one. Core-set
/// iteration: start at the first point and, for ceil(1/eps^2) rounds, move the
/// center a 1/(i+1) fraction toward the farthest point.
meb_result approx_meb(curve_view points, double eps);
meb_result approx_meb(const std::vector<point>& points, double eps);

/// An enclosing-ball routine together with its approximation factor: every
/// returned radius is at most `slack` times the optimum.
struct ball_solver {
    std::function<meb_result(curve_view)> solve;
    double slack = 1.0;
};

ball_solver approximate_ball_solver(double eps);

struct cover_result {
    point center;
    std::size_t covered = 0; ///< s: length of the covered prefix
};

/// Finds s such that a ball of radius slack*r covers A[1..s] and, if s < |A|,
/// A[1..s+1] has minimum enclosing radius > r. Doubling probe, then binary search.
cover_result cover_prefix(curve_view a, double r, const ball_solver& solver);
cover_result cover_prefix(curve_view a, double r, double eps);

struct simplify_outcome {
    std::optional<curve> simplified; ///< empty when infeasible
    std::size_t pieces = 0;          ///< greedy vertex count before padding

    bool feasible() const noexcept { return simplified.has_value(); }
};

/// Greedy simplification under the discrete Frechet distance. On success the
/// result has exactly k vertices (the last center repeated when fewer are
/// needed) and lies within slack*r of `c`. Infeasible means every curve with
/// k vertices is farther than r from `c`.
simplify_outcome simplify_dfd(const curve& c, std::size_t k, double r, const ball_solver& solver,
                              bool pad_to_k = true);
simplify_outcome simplify_dfd(const curve& c, std::size_t k, double r, double eps,
                              bool pad_to_k = true);

} // namespace annc

#endif // ANNC_SIMPLIFY_HPP
