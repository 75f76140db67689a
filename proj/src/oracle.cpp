#include "annc/oracle.hpp"

#include "annc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace annc::oracle {

answer linear_scan_nn(const std::vector<curve>& curves, const curve& q, const metric& m,
                      double radius) {
    if (curves.empty()) {
        throw config_error("linear scan over an empty dataset");
    }
    answer out;
    out.nearest_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        require_same_dim(curves[i].dim(), q.dim(), "oracle query");
        const double dist = distance(curves[i], q, m);
        if (dist < out.nearest_distance) {
            out.nearest_distance = dist;
            out.nearest = i;
        }
        if (dist <= radius) {
            out.within.push_back(i);
        }
    }
    out.nearest_id = curves[out.nearest].id();
    return out;
}

std::size_t count_within(const std::vector<curve>& curves, const curve& q, const metric& m,
                         double radius) {
    std::size_t n = 0;
    for (const auto& c : curves) {
        if (distance(c, q, m) <= radius) {
            ++n;
        }
    }
    return n;
}

std::set<lattice_curve_key> brute_candidates(const curve& anchor,
                                             const std::vector<lattice_point>& pool,
                                             double edge, std::size_t out_len, double radius,
                                             const metric& m, std::uint64_t limit) {
    if (out_len == 0) {
        throw config_error("candidate length must be positive");
    }
    const std::size_t d = anchor.dim();
    double tuples = std::pow(static_cast<double>(pool.size()), static_cast<double>(out_len));
    if (tuples > static_cast<double>(limit)) {
        throw capacity_error("brute-force candidate space exceeds the oracle limit");
    }
    for (const auto& v : pool) {
        require_same_dim(v.dim(), d, "pool point");
    }

    std::set<lattice_curve_key> out;
    if (pool.empty()) {
        return out;
    }
    std::vector<std::size_t> digits(out_len, 0);
    std::vector<lattice_coord> cells(out_len * d);
    std::vector<double> coords(out_len * d);
    while (true) {
        for (std::size_t j = 0; j < out_len; ++j) {
            for (std::size_t t = 0; t < d; ++t) {
                cells[j * d + t] = pool[digits[j]].coords[t];
                coords[j * d + t] = static_cast<double>(cells[j * d + t]) * edge;
            }
        }
        if (distance(anchor.view(), curve_view{coords, d}, m) <= radius) {
            out.emplace(d, cells);
        }
        std::size_t j = out_len;
        while (j > 0 && ++digits[j - 1] == pool.size()) {
            digits[j - 1] = 0;
            --j;
        }
        if (j == 0) {
            break;
        }
    }
    return out;
}

namespace {

// Center of the ball through `support` whose center lies in their affine hull,
// or nullopt when the points are affinely dependent.
std::optional<std::vector<double>> circumcenter(const std::vector<const point*>& support) {
    const std::size_t d = support[0]->dim();
    const std::size_t k = support.size() - 1;
    std::vector<std::vector<double>> v(k, std::vector<double>(d));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t t = 0; t < d; ++t) {
            v[i][t] = (*support[i + 1])[t] - (*support[0])[t];
        }
    }
    // Gram system G lambda = |v_i|^2 / 2, solved by Gaussian elimination.
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1));
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < d; ++t) {
                dot += v[i][t] * v[j][t];
            }
            a[i][j] = dot;
        }
        a[i][k] = a[i][i] / 2.0;
        scale = std::max(scale, a[i][i]);
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (std::abs(a[piv][c]) <= 1e-12 * scale) {
            return std::nullopt;
        }
        std::swap(a[piv], a[c]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) {
                continue;
            }
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= k; ++j) {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    std::vector<double> center(support[0]->coords().begin(), support[0]->coords().end());
    for (std::size_t i = 0; i < k; ++i) {
        const double lambda = a[i][k] / a[i][i];
        for (std::size_t t = 0; t < d; ++t) {
            center[t] += lambda * v[i][t];
        }
    }
    return center;
}

double farthest(const std::vector<point>& points, std::span<const double> center) {
    double r = 0.0;
    for (const auto& p : points) {
        r = std::max(r, euclidean_distance(p.coords(), center));
    }
    return r;
}

} // namespace

ball exact_meb_small_d(const std::vector<point>& points) {
    if (points.empty()) {
        throw config_error("enclosing ball of no points");
    }
    const std::size_t d = points[0].dim();
    if (d > 3) {
        throw dimension_error("exact enclosing ball supports d <= 3 only");
    }
    for (const auto& p : points) {
        require_same_dim(p.dim(), d, "ball point");
    }

    const std::size_t n = points.size();
    ball best{points[0], std::numeric_limits<double>::infinity()};
    std::vector<const point*> support;
    std::vector<std::size_t> pick;
    // All subsets of size 1..d+1 in lexicographic order of indices.
    for (std::size_t size = 1; size <= std::min(n, d + 1); ++size) {
        pick.resize(size);
        for (std::size_t i = 0; i < size; ++i) {
            pick[i] = i;
        }
        while (true) {
            support.clear();
            for (auto i : pick) {
                support.push_back(&points[i]);
            }
            if (auto c = circumcenter(support)) {
                const double r = euclidean_distance(support[0]->coords(), *c);
                if (r < best.radius && farthest(points, *c) <= r * (1.0 + 1e-12) + 1e-15) {
                    best = {point(*c), r};
                }
            }
            std::size_t i = size;
            while (i > 0 && pick[i - 1] == n - size + i - 1) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++pick[i - 1];
            for (std::size_t j = i; j < size; ++j) {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    // Report the true farthest distance so the ball provably encloses.
    best.radius = farthest(points, best.center.coords());
    return best;
}

std::size_t min_simplification_length(const curve& c, double r) {
    const auto pts = c.points();
    const std::size_t m = pts.size();
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    // best[j]: fewest runs covering the first j vertices.
    std::vector<std::size_t> best(m + 1, none);
    best[0] = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (best[i] == none) {
                continue;
            }
            std::vector<point> run(pts.begin() + static_cast<std::ptrdiff_t>(i),
                                   pts.begin() + static_cast<std::ptrdiff_t>(j));
            if (exact_meb_small_d(run).radius <= r) {
                best[j] = std::min(best[j], best[i] + 1);
            }
        }
    }
    return best[m];
}

} // namespace annc::oracle
