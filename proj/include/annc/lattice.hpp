#ifndef ANNC_LATTICE_HPP
#define ANNC_LATTICE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace annc {

using lattice_coord = std::int64_t;

/// A grid point in integer units of the grid edge.
struct lattice_point {
    std::vector<lattice_coord> coords;

    std::size_t dim() const noexcept { return coords.size(); }

    friend auto operator<=>(const lattice_point&, const lattice_point&) = default;
};

/// A snapped curve: one lattice point per vertex, flattened row-major.
/// Ordered lexicographically over the flattened integers.
struct lattice_curve_key {
    std::size_t dim = 1;
    std::vector<lattice_coord> cells;

    lattice_curve_key() = default;
    lattice_curve_key(std::size_t d, std::vector<lattice_coord> c) : dim(d), cells(std::move(c)) {}

    std::size_t size() const noexcept { return dim == 0 ? 0 : cells.size() / dim; }
    std::span<const lattice_coord> vertex(std::size_t i) const {
        return std::span<const lattice_coord>(cells).subspan(i * dim, dim);
    }

    friend bool operator==(const lattice_curve_key& a, const lattice_curve_key& b) {
        return a.dim == b.dim && a.cells == b.cells;
    }
    friend std::strong_ordering operator<=>(const lattice_curve_key& a,
                                            const lattice_curve_key& b) {
        if (auto c = a.cells <=> b.cells; c != 0) {
            return c;
        }
        return a.dim <=> b.dim;
    }
};

inline std::size_t hash_cells(std::span<const lattice_coord> cells) noexcept {
    // splitmix64 finalizer folded over the coordinates
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ cells.size();
    for (lattice_coord c : cells) {
        std::uint64_t z = h + static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        h = z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
}

struct lattice_curve_key_hash {
    std::size_t operator()(const lattice_curve_key& k) const noexcept {
        return hash_cells(k.cells);
    }
};

} // namespace annc

#endif // ANNC_LATTICE_HPP
