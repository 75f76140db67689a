#ifndef ANNC_GEOMETRY_HPP
#define ANNC_GEOMETRY_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace annc {

/// A point in R^d. Coordinates are finite and d >= 1.
class point {
public:
    point() = default;
    explicit point(std::vector<double> coords);
    point(std::initializer_list<double> coords) : point(std::vector<double>(coords)) {}

    std::size_t dim() const noexcept { return coords_.size(); }
    std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    operator std::span<const double>() const noexcept { return coords_; }

    friend bool operator==(const point&, const point&) = default;

private:
    std::vector<double> coords_;
};

/// Non-owning view of a curve stored as row-major vertex coordinates.
struct curve_view {
    std::span<const double> coords;
    std::size_t dim = 1;

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> vertex(std::size_t i) const { return coords.subspan(i * dim, dim); }
};

/// An identified polygonal curve: a non-empty sequence of points of equal dimension.
class curve {
public:
    curve() = default;
    curve(std::string id, std::size_t dim, std::vector<double> coords);
    curve(std::string id, const std::vector<point>& points);

    const std::string& id() const noexcept { return id_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> vertex(std::size_t i) const {
        return std::span<const double>(coords_).subspan(i * dim_, dim_);
    }
    std::span<const double> coords() const noexcept { return coords_; }
    std::vector<point> points() const;

    curve_view view() const noexcept { return {coords_, dim_}; }
    operator curve_view() const noexcept { return view(); }

    friend bool operator==(const curve&, const curve&) = default;

private:
    std::string id_;
    std::size_t dim_ = 1;
    std::vector<double> coords_;
};

/// Exponent p of the l_{p,2} family. p = infinity is the discrete Frechet
/// distance, p = 1 is dynamic time warping.
class metric {
public:
    enum class kind { frechet, time_warping, general };

    explicit metric(double p);

    static metric dfd() { return metric(std::numeric_limits<double>::infinity()); }
    static metric dtw() { return metric(1.0); }
    /// "dfd", "dtw", or "p=<real>" (p=inf is the discrete Frechet distance).
    static metric parse(std::string_view text);

    double p() const noexcept { return p_; }
    kind family() const noexcept;
    bool is_dfd() const noexcept { return family() == kind::frechet; }
    bool is_finite() const noexcept { return !is_dfd(); }

    /// Per-pair contribution for finite p: ||a-b||^p, computed without a
    /// root when p is 1 or 2. For p = infinity returns ||a-b||.
    double pair_cost(std::span<const double> a, std::span<const double> b) const;
    /// Maps an aggregated sum of pair costs back to a distance.
    double finish(double aggregated) const;
    /// Maps a distance threshold to the aggregated-cost scale.
    double budget(double radius) const;

    std::string name() const;

    friend bool operator==(const metric&, const metric&) = default;

private:
    double p_;
};

/// 1-based index pairs (i, j) from (1,1) to (m1,m2), each step advancing i, j or both.
struct alignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    friend bool operator==(const alignment&, const alignment&) = default;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// True iff tau is a valid alignment of curves of lengths m1 and m2.
bool is_valid_alignment(const alignment& tau, std::size_t m1, std::size_t m2);

/// True iff tau contains a pair whose removal leaves a valid alignment
/// (an i-only step followed by a j-only step around it, or vice versa).
bool has_redundant_pair(const alignment& tau);

double alignment_cost(const alignment& tau, curve_view p, curve_view q, const metric& m);

/// Exact l_{p,2} distance by the O(|p|·|q|) dynamic program.
double distance(curve_view p, curve_view q, const metric& m);

/// Visits every alignment of lengths (m1, m2) in lexicographic step order.
/// Requires m1 + m2 <= 24.
void for_each_alignment(std::size_t m1, std::size_t m2, bool non_redundant_only,
                        const std::function<void(const alignment&)>& visit);

std::vector<alignment> enumerate_alignments(std::size_t m1, std::size_t m2,
                                            bool non_redundant_only);

inline constexpr std::size_t max_enumerated_alignment_size = 24;

void require_same_dim(std::size_t a, std::size_t b, const char* what);

} // namespace annc

#endif // ANNC_GEOMETRY_HPP
