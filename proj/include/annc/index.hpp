#ifndef ANNC_INDEX_HPP
#define ANNC_INDEX_HPP

#include "annc/candidates.hpp"
#include "annc/dictionary.hpp"
#include "annc/geometry.hpp"
#include "annc/grid.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace annc {

struct index_params {
    double epsilon = 1.0;
    double r = 1.0;
    metric measure = metric::dfd();
    dict_mode mode = dict_mode::near_neighbor;
    /// Query length of the asymmetric variant (discrete Frechet only).
    std::optional<std::size_t> asymmetric_k;
    /// Supported query lengths. Empty means the longest input length in the
    /// symmetric setting and k in the asymmetric one.
    std::vector<std::size_t> query_lengths;
    /// Shorthand for query_lengths = 1..longest input length.
    bool all_lengths = false;
    backend_kind backend = backend_kind::hashed;
    std::uint64_t max_candidates = default_max_candidates;
    unsigned threads = 1;

    void validate() const;
};

struct query_result {
    std::optional<std::string> id;
    double guarantee = 0.0; ///< (1 + eps) * r

    bool matched() const noexcept { return id.has_value(); }
};

struct build_stats {
    /// Candidate set size per input curve and query length, in input order.
    std::vector<std::pair<std::string, std::map<std::size_t, std::uint64_t>>> per_curve;
    std::uint64_t candidates = 0;
    /// Asymmetric mode: curves with no k-vertex simplification within r.
    std::vector<std::string> skipped;
};

class curve_index {
public:
    static curve_index build(const std::vector<curve>& curves, const index_params& params);

    curve_index(const curve_index&) = delete;
    curve_index& operator=(const curve_index&) = delete;
    curve_index(curve_index&& other) noexcept;
    curve_index& operator=(curve_index&& other) noexcept;

    const index_params& params() const noexcept { return params_; }
    std::vector<std::size_t> query_lengths() const;
    const grid_spec& grid(std::size_t length) const;
    const dictionary& dict(std::size_t length) const;
    std::size_t dictionary_size() const;
    const build_stats& stats() const noexcept { return stats_; }
    const std::vector<curve>& curves() const noexcept { return curves_; }
    std::size_t dim() const noexcept { return dim_; }
    /// Input length bound baked into the finite-p grids.
    std::size_t max_input_length() const noexcept { return max_input_len_; }

    /// Snap, then one dictionary lookup. Near-neighbor mode only.
    query_result query(const curve& q) const;
    /// Stored count at the snapped query, 0 if absent. Counting mode only.
    std::uint64_t count(const curve& q) const;
    /// Dictionary lookups served so far.
    std::uint64_t lookups() const noexcept { return lookups_.load(std::memory_order_relaxed); }

    /// Adds a curve as if it had been last in the build input.
    void insert_curve(const curve& c);
    /// Removes a curve; the result equals a fresh build over the survivors.
    void delete_curve(const std::string& id);

    /// Asymmetric mode: the k-vertex curve the candidates of `c` are generated
    /// around, or nullopt when `c` has none within r and is left out.
    std::optional<curve> simplification(const curve& c) const;

    /// True when the key's grid curve belongs to the candidate set of `c`.
    bool in_candidate_set(const curve& c, const lattice_curve_key& key) const;

    /// Rechecks every `stride`-th entry (in key order) against the survivors:
    /// a near-neighbor payload must name the first curve whose candidate set
    /// holds the key, a count must equal the number of such curves.
    /// Returns the number of entries that fail.
    std::size_t audit(std::size_t stride = 1) const;

    void save(const std::filesystem::path& path) const;
    void write(std::ostream& os) const;
    static curve_index load(const std::filesystem::path& path,
                            backend_kind backend = backend_kind::hashed);
    static curve_index read(std::istream& is, backend_kind backend = backend_kind::hashed);

    /// Throws config_error if the stored parameters differ from `expected`.
    void require_params(double epsilon, double r, const metric& m, dict_mode mode) const;

private:
    struct block {
        grid_spec grid;
        dictionary dict;
    };

    curve_index() = default;

    std::size_t m_norm_for(std::size_t length) const;
    candidate_request request_for(const curve& c, std::size_t length) const;
    /// Enumeration requests for `c`, one per query length; nullopt when an
    /// asymmetric simplification is infeasible.
    std::optional<std::vector<candidate_request>> requests(const curve& c) const;
    /// Candidate set of `c` per query length; nullopt when an asymmetric
    /// simplification is infeasible and the curve contributes nothing.
    std::optional<std::map<std::size_t, candidate_set>> candidate_sets(const curve& c) const;
    void fold(dictionary& dict, const lattice_curve_key& key, const std::string& id);
    void record(const curve& c, bool skipped, std::map<std::size_t, std::uint64_t> sizes);
    void admit(const curve& c);
    const block& block_for(const curve& q) const;

    index_params params_;
    std::size_t dim_ = 0;
    std::size_t max_input_len_ = 0;
    std::map<std::size_t, block> blocks_;
    std::vector<curve> curves_;
    std::unordered_map<std::string, std::size_t> positions_;
    build_stats stats_;
    mutable std::atomic<std::uint64_t> lookups_{0};
};

} // namespace annc

#endif // ANNC_INDEX_HPP
