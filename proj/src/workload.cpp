#include "annc/workload.hpp"

#include "annc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace annc {

namespace {

using rng = std::mt19937_64;

double uniform(rng& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

std::vector<double> direction(rng& g, std::size_t d) {
    std::normal_distribution<double> normal;
    std::vector<double> v(d);
    double len = 0.0;
    while (len < 1e-9) {
        for (auto& x : v) {
            x = normal(g);
        }
        len = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    }
    for (auto& x : v) {
        x /= len;
    }
    return v;
}

// Moves each vertex of `base` by a random direction times the given length.
curve displaced(const std::string& id, const std::vector<double>& base, std::size_t d,
                const std::vector<double>& lengths, rng& g) {
    std::vector<double> out = base;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const auto u = direction(g, d);
        for (std::size_t t = 0; t < d; ++t) {
            out[i * d + t] += lengths[i] * u[t];
        }
    }
    return curve(id, d, std::move(out));
}

// Per-vertex lengths whose aggregate under the metric equals `total`.
std::vector<double> near_lengths(std::size_t count, double total, const metric& m, rng& g) {
    std::vector<double> w(count);
    for (auto& x : w) {
        x = uniform(g, 0.0, 1.0);
    }
    double norm = 0.0;
    if (m.is_dfd()) {
        norm = *std::max_element(w.begin(), w.end());
    } else {
        for (double x : w) {
            norm += std::pow(x, m.p());
        }
        norm = std::pow(norm, 1.0 / m.p());
    }
    for (auto& x : w) {
        x = norm > 0.0 ? total * x / norm : 0.0;
    }
    return w;
}

} // namespace

workload make_workload(const workload_spec& spec) {
    if (spec.n == 0 || spec.m == 0 || spec.d == 0) {
        throw config_error("workload needs n, m and d positive");
    }
    const std::size_t qlen = spec.query_len == 0 ? spec.m : spec.query_len;
    if (qlen > spec.m) {
        throw config_error("workload queries cannot be longer than the inputs");
    }
    const bool clustered = qlen < spec.m;
    const std::size_t d = spec.d;
    const double r = spec.r;
    rng g(spec.seed);

    workload out;
    // Per input curve: the vertices queries are derived from.
    std::vector<std::vector<double>> bases;
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::vector<double> coords;
        std::vector<double> base;
        if (!clustered) {
            for (std::size_t j = 0; j < spec.m * d; ++j) {
                coords.push_back(uniform(g, 0.0, spec.box * r));
            }
            base = coords;
        } else {
            for (std::size_t t = 0; t < d; ++t) {
                base.push_back(uniform(g, 0.0, spec.box * r));
            }
            for (std::size_t j = 1; j < qlen; ++j) {
                const auto u = direction(g, d);
                const double step = uniform(g, 1.5 * r, 4.0 * r);
                for (std::size_t t = 0; t < d; ++t) {
                    base.push_back(base[(j - 1) * d + t] + step * u[t]);
                }
            }
            // Split the m vertices into qlen non-empty consecutive runs.
            std::vector<std::size_t> cuts(spec.m - 1);
            std::iota(cuts.begin(), cuts.end(), 1);
            std::shuffle(cuts.begin(), cuts.end(), g);
            cuts.resize(qlen - 1);
            std::sort(cuts.begin(), cuts.end());
            std::size_t cluster = 0;
            for (std::size_t j = 0; j < spec.m; ++j) {
                while (cluster < cuts.size() && j >= cuts[cluster]) {
                    ++cluster;
                }
                const auto u = direction(g, d);
                const double len = uniform(g, 0.0, r / 2.0);
                for (std::size_t t = 0; t < d; ++t) {
                    coords.push_back(base[cluster * d + t] + len * u[t]);
                }
            }
        }
        out.curves.emplace_back("c" + std::to_string(i), d, std::move(coords));
        bases.push_back(std::move(base));
    }

    const std::size_t near = (spec.queries + 1) / 2;
    std::uniform_int_distribution<std::size_t> pick(0, spec.n - 1);
    for (std::size_t q = 0; q < spec.queries; ++q) {
        const auto& base = bases[pick(g)];
        std::vector<double> lengths;
        if (q < near) {
            // Clustered inputs already sit within r/2 of their centers.
            const double total = clustered ? uniform(g, 0.0, r / 2.0) : uniform(g, 0.0, r);
            lengths = near_lengths(qlen, total, clustered ? metric::dfd() : spec.measure, g);
        } else {
            for (std::size_t j = 0; j < qlen; ++j) {
                lengths.push_back(uniform(g, r, (2.0 + spec.epsilon) * r));
            }
        }
        out.queries.push_back(displaced("q" + std::to_string(q), base, d, lengths, g));
    }
    return out;
}

} // namespace annc
