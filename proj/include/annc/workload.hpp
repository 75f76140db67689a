#ifndef ANNC_WORKLOAD_HPP
#define ANNC_WORKLOAD_HPP

// Seeded random instances for benchmarks and end-to-end tests.

#include "annc/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace annc {

struct workload_spec {
    std::size_t n = 20;       ///< input curves
    std::size_t m = 4;        ///< vertices per input curve
    std::size_t d = 2;
    std::size_t queries = 200;
    /// Query length; 0 means m. Shorter queries follow the clustered model below.
    std::size_t query_len = 0;
    double r = 1.0;
    metric measure = metric::dfd();
    double epsilon = 1.0;
    /// Side of the box holding input vertices, in units of r.
    double box = 6.0;
    std::uint64_t seed = 1;
};

struct workload {
    std::vector<curve> curves;
    std::vector<curve> queries;
};

/// Input vertices are uniform in [0, box*r]^d. When query_len < m each input
/// curve instead walks through query_len cluster centers, placing its vertices
/// within r/2 of them in order, so short queries can come close.
///
/// The first half of the queries are near: a random input (or its cluster
/// centers) moved by per-vertex displacements whose aggregated size under the
/// metric is at most r. The second half are far: per-vertex displacements of
/// size between r and (2 + eps) r, so many land in the (r, (1+eps) r] band.
workload make_workload(const workload_spec& spec);

} // namespace annc

#endif // ANNC_WORKLOAD_HPP
