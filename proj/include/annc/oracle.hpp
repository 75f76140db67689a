#ifndef ANNC_ORACLE_HPP
#define ANNC_ORACLE_HPP

// Brute-force baselines for tests and benchmarks. Depends on geometry and the
// plain lattice types only, never on the structures it is used to check.

#include "annc/geometry.hpp"
#include "annc/lattice.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace annc::oracle {

struct answer {
    std::size_t nearest = 0; ///< index into the input sequence
    std::string nearest_id;
    double nearest_distance = 0.0;
    std::vector<std::size_t> within; ///< indices with distance <= radius, in input order
};

/// Exact nearest curve by full distance evaluation; ties go to the earlier curve.
answer linear_scan_nn(const std::vector<curve>& curves, const curve& q, const metric& m,
                      double radius = 0.0);

/// Number of curves with distance <= radius.
std::size_t count_within(const std::vector<curve>& curves, const curve& q, const metric& m,
                         double radius);

inline constexpr std::uint64_t brute_candidate_limit = 1'000'000;

/// Every curve of length out_len over `pool` (lattice points scaled by `edge`)
/// within `radius` of the anchor. Throws capacity_error past `limit` tuples.
std::set<lattice_curve_key> brute_candidates(const curve& anchor,
                                             const std::vector<lattice_point>& pool,
                                             double edge, std::size_t out_len, double radius,
                                             const metric& m,
                                             std::uint64_t limit = brute_candidate_limit);

struct ball {
    point center;
    double radius = 0.0;
};

/// Exact minimum enclosing ball for d <= 3: the smallest circumscribed ball of
/// a subset of at most d+1 points that encloses everything.
ball exact_meb_small_d(const std::vector<point>& points);

/// Fewest vertices of any curve within discrete Frechet distance r of `c`:
/// a minimum partition into consecutive runs of exact enclosing radius <= r.
std::size_t min_simplification_length(const curve& c, double r);

} // namespace annc::oracle

#endif // ANNC_ORACLE_HPP
