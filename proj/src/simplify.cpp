#include "annc/simplify.hpp"

#include "annc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace annc {

meb_result approx_meb(curve_view points, double eps) {
    if (points.size() == 0) {
        throw structural_error("minimum enclosing ball of an empty point set");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw config_error("ball approximation eps must lie in (0, 1]");
    }
    const std::size_t d = points.dim;
    const std::size_t n = points.size();
    const auto first = points.vertex(0);
    std::vector<double> c(first.begin(), first.end());

    auto farthest = [&]() {
        std::size_t best = 0;
        double best_sq = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sq = squared_distance(points.vertex(i), c);
            if (sq > best_sq) {
                best_sq = sq;
                best = i;
            }
        }
        return std::pair{best, best_sq};
    };

    const auto rounds = static_cast<std::size_t>(std::ceil(1.0 / (eps * eps)));
    for (std::size_t i = 1; i <= rounds; ++i) {
        const auto [far, far_sq] = farthest();
        if (far_sq == 0.0) {
            break;
        }
        const auto f = points.vertex(far);
        const double step = 1.0 / static_cast<double>(i + 1);
        for (std::size_t k = 0; k < d; ++k) {
            c[k] += (f[k] - c[k]) * step;
        }
    }

    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        radius = std::max(radius, euclidean_distance(points.vertex(i), c));
    }
    return {point(std::move(c)), radius};
}

meb_result approx_meb(const std::vector<point>& points, double eps) {
    if (points.empty()) {
        throw structural_error("minimum enclosing ball of an empty point set");
    }
    return approx_meb(curve("", points).view(), eps);
}

ball_solver approximate_ball_solver(double eps) {
    return {[eps](curve_view pts) { return approx_meb(pts, eps); }, 1.0 + eps};
}

cover_result cover_prefix(curve_view a, double r, const ball_solver& solver) {
    const std::size_t n = a.size();
    if (n == 0) {
        throw structural_error("cover_prefix of an empty sequence");
    }
    if (!(r > 0.0)) {
        throw config_error("cover radius must be positive");
    }
    const double limit = solver.slack * r;
    auto prefix = [&](std::size_t s) { return curve_view{a.coords.first(s * a.dim), a.dim}; };
    auto probe = [&](std::size_t s) -> std::optional<point> {
        auto ball = solver.solve(prefix(s));
        if (ball.radius <= limit) {
            return std::move(ball.center);
        }
        return std::nullopt;
    };

    if (auto whole = probe(n)) {
        return {std::move(*whole), n};
    }

    // Doubling: lo is coverable, hi is not.
    auto first = a.vertex(0);
    point lo_center(std::vector<double>(first.begin(), first.end()));
    std::size_t lo = 1;
    std::size_t hi = n;
    while (2 * lo < n) {
        auto ball = probe(2 * lo);
        if (!ball) {
            hi = 2 * lo;
            break;
        }
        lo_center = std::move(*ball);
        lo *= 2;
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (auto ball = probe(mid)) {
            lo = mid;
            lo_center = std::move(*ball);
        } else {
            hi = mid;
        }
    }
    return {std::move(lo_center), lo};
}

cover_result cover_prefix(curve_view a, double r, double eps) {
    return cover_prefix(a, r, approximate_ball_solver(eps));
}

simplify_outcome simplify_dfd(const curve& c, std::size_t k, double r, const ball_solver& solver,
                              bool pad_to_k) {
    if (k == 0) {
        throw config_error("simplification length k must be at least 1");
    }
    const std::size_t d = c.dim();
    std::vector<double> centers;
    std::size_t pieces = 0;
    std::size_t start = 0;
    const auto all = c.view();
    while (start < c.size()) {
        const curve_view rest{all.coords.subspan(start * d), d};
        auto cover = cover_prefix(rest, r, solver);
        ++pieces;
        if (pieces > k) {
            return {std::nullopt, pieces};
        }
        centers.insert(centers.end(), cover.center.coords().begin(), cover.center.coords().end());
        start += cover.covered;
    }
    if (pad_to_k) {
        const std::vector<double> last(centers.end() - static_cast<std::ptrdiff_t>(d), centers.end());
        while (centers.size() < k * d) {
            centers.insert(centers.end(), last.begin(), last.end());
        }
    }
    return {curve(c.id(), d, std::move(centers)), pieces};
}

simplify_outcome simplify_dfd(const curve& c, std::size_t k, double r, double eps,
                              bool pad_to_k) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw config_error("simplification eps must lie in (0, 1]");
    }
    return simplify_dfd(c, k, r, approximate_ball_solver(eps), pad_to_k);
}

} // namespace annc
