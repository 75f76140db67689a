#ifndef ANNC_CANDIDATES_HPP
#define ANNC_CANDIDATES_HPP

#include "annc/geometry.hpp"
#include "annc/grid.hpp"
#include "annc/lattice.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace annc {

inline constexpr std::uint64_t default_max_candidates = 100'000'000;

/// Describes one candidate set: every grid curve of length `out_len` whose
/// distance to `anchor` is at most `enum_radius` and, when a filter is given,
/// whose distance to `filter_curve` is at most `filter_radius`.
struct candidate_request {
    curve anchor;
    std::optional<curve> filter_curve;
    std::size_t out_len = 1;
    double enum_radius = 0.0;
    std::optional<double> filter_radius;
    grid_spec grid;
    metric measure = metric::dfd();
    std::uint64_t max_candidates = default_max_candidates;
};

struct candidate_set {
    std::vector<lattice_curve_key> keys;

    std::size_t size() const noexcept { return keys.size(); }
};

/// Receives the flattened lattice cells (out_len * d integers) of each candidate.
using candidate_sink = std::function<void(std::span<const lattice_coord>)>;

/// Deduplicated union of the grid points within `radius` of any anchor vertex,
/// in lexicographic order.
std::vector<lattice_point> vertex_pool(curve_view anchor, double radius, const grid_spec& grid);

/// Streams the candidate set in lexicographic key order and returns its size.
/// Dispatches on the request's metric.
std::uint64_t for_each_candidate(const candidate_request& req, const candidate_sink& sink);

/// Discrete Frechet candidates via depth-first construction with free-space
/// reachability pruning.
candidate_set enumerate_dfd(const candidate_request& req);

/// Finite-p candidates via depth-first construction carrying the partial-cost row.
candidate_set enumerate_lp(const candidate_request& req);

candidate_set enumerate_candidates(const candidate_request& req);

} // namespace annc

#endif // ANNC_CANDIDATES_HPP
