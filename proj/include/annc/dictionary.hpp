#ifndef ANNC_DICTIONARY_HPP
#define ANNC_DICTIONARY_HPP

#include "annc/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace annc {

enum class dict_mode : std::uint8_t { near_neighbor = 0, range_count = 1 };
enum class backend_kind { hashed, prefix_tree };

/// Either the id of the curve that answers a key, or the number of curves
/// whose candidate sets contain it.
struct payload {
    std::variant<std::string, std::uint64_t> value;

    static payload curve_id(std::string id) { return {std::move(id)}; }
    static payload counter(std::uint64_t n) { return {n}; }

    bool is_count() const noexcept { return value.index() == 1; }
    const std::string& id() const { return std::get<0>(value); }
    std::uint64_t count() const { return std::get<1>(value); }

    friend bool operator==(const payload&, const payload&) = default;
};

/// Storage engine behind a dictionary: exact-match map from keys to a 64-bit slot.
class key_store {
public:
    virtual ~key_store() = default;

    virtual const std::uint64_t* find(const lattice_curve_key& key) const = 0;
    virtual std::uint64_t* find(const lattice_curve_key& key) = 0;
    /// Inserts (key, value) if absent. Returns the slot and whether it was inserted.
    virtual std::pair<std::uint64_t*, bool> try_emplace(const lattice_curve_key& key,
                                                        std::uint64_t value) = 0;
    virtual bool erase(const lattice_curve_key& key) = 0;
    virtual std::size_t size() const = 0;
    /// Number of nodes excluding the root (prefix tree); equals size() for the hash map.
    virtual std::size_t node_count() const = 0;
    virtual void for_each(
        const std::function<void(const lattice_curve_key&, std::uint64_t)>& visit) const = 0;
    virtual void clear() = 0;
    virtual std::unique_ptr<key_store> clone() const = 0;
};

std::unique_ptr<key_store> make_key_store(backend_kind kind);

/// Parameters recorded in the persisted header. The dictionary itself only
/// interprets `mode`, `dim` and `out_len`.
struct dict_header {
    dict_mode mode = dict_mode::near_neighbor;
    double p = 0.0; ///< 0 encodes p = infinity
    double epsilon = 1.0;
    double r = 1.0;
    std::uint64_t dim = 1;
    std::uint64_t out_len = 1;
    double edge = 1.0;

    friend bool operator==(const dict_header&, const dict_header&) = default;
};

inline constexpr char dict_magic[4] = {'A', 'N', 'N', 'C'};
inline constexpr std::uint32_t dict_format_version = 1;

/// Map from snapped grid curves of one fixed length to payloads.
class dictionary {
public:
    explicit dictionary(dict_header header, backend_kind backend = backend_kind::hashed);

    dictionary(const dictionary& other);
    dictionary& operator=(const dictionary& other);
    dictionary(dictionary&&) noexcept = default;
    dictionary& operator=(dictionary&&) noexcept = default;

    const dict_header& header() const noexcept { return header_; }
    dict_mode mode() const noexcept { return header_.mode; }
    backend_kind backend() const noexcept { return backend_; }
    std::size_t size() const { return store_->size(); }
    std::size_t node_count() const { return store_->node_count(); }

    /// Inserts only if the key is absent; an existing payload is never replaced.
    bool insert_first_wins(const lattice_curve_key& key, std::string_view id);
    /// Overwrites (or creates) the payload of a key. Near-neighbor mode only.
    void assign(const lattice_curve_key& key, std::string_view id);
    /// Absent keys start at 1. Counting mode only.
    std::uint64_t increment(const lattice_curve_key& key);
    /// Removes the key when its count reaches zero. Returns the remaining count.
    std::uint64_t decrement(const lattice_curve_key& key);
    bool erase(const lattice_curve_key& key);

    std::optional<payload> lookup(const lattice_curve_key& key) const;

    /// All entries in lexicographic key order.
    std::vector<std::pair<lattice_curve_key, payload>> entries() const;

    void write(std::ostream& os) const;
    static dictionary read(std::istream& is, backend_kind backend = backend_kind::hashed);
    /// Reads the body of a dictionary whose magic has already been consumed.
    static dictionary read_after_magic(std::istream& is, backend_kind backend);

    void save(const std::filesystem::path& path) const;
    static dictionary load(const std::filesystem::path& path,
                           backend_kind backend = backend_kind::hashed);

private:
    void require_key(const lattice_curve_key& key) const;
    void require_mode(dict_mode m, const char* op) const;
    std::uint64_t intern(std::string_view id);

    dict_header header_;
    backend_kind backend_;
    std::unique_ptr<key_store> store_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint64_t> name_index_;
};

} // namespace annc

#endif // ANNC_DICTIONARY_HPP
