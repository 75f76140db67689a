#include "annc/dictionary.hpp"

#include "annc/errors.hpp"
#include "binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <span>

namespace annc {

namespace {

// Open addressing with linear probing. Keys all share one shape, so their
// cells live in one flat arena at a fixed stride and the table holds indices.
class hash_store final : public key_store {
public:
    const std::uint64_t* find(const lattice_curve_key& key) const override {
        const auto slot = probe(key.cells);
        return table_.empty() || table_[slot] == empty ? nullptr : &values_[table_[slot]];
    }
    std::uint64_t* find(const lattice_curve_key& key) override {
        const auto slot = probe(key.cells);
        return table_.empty() || table_[slot] == empty ? nullptr : &values_[table_[slot]];
    }
    std::pair<std::uint64_t*, bool> try_emplace(const lattice_curve_key& key,
                                                std::uint64_t value) override {
        if (values_.empty() && cells_.empty()) {
            dim_ = key.dim;
            stride_ = key.cells.size();
        }
        if ((values_.size() + 1) * 10 > table_.size() * 7) {
            rehash(std::max<std::size_t>(16, table_.size() * 2));
        }
        const auto slot = probe(key.cells);
        if (table_[slot] != empty) {
            return {&values_[table_[slot]], false};
        }
        if (values_.size() >= empty) {
            throw capacity_error("hashed dictionary is full");
        }
        table_[slot] = static_cast<std::uint32_t>(values_.size());
        cells_.insert(cells_.end(), key.cells.begin(), key.cells.end());
        values_.push_back(value);
        return {&values_.back(), true};
    }
    bool erase(const lattice_curve_key& key) override {
        if (table_.empty()) {
            return false;
        }
        auto slot = probe(key.cells);
        if (table_[slot] == empty) {
            return false;
        }
        const std::uint32_t victim = table_[slot];
        remove_slot(slot);
        // Move the last entry into the hole so the arena stays dense.
        const auto last = static_cast<std::uint32_t>(values_.size() - 1);
        if (victim != last) {
            const auto moved = probe(entry(last));
            std::copy_n(cells_.begin() + last * stride_, stride_,
                        cells_.begin() + victim * stride_);
            values_[victim] = values_[last];
            table_[moved] = victim;
        }
        cells_.resize(last * stride_);
        values_.pop_back();
        return true;
    }
    std::size_t size() const override { return values_.size(); }
    std::size_t node_count() const override { return values_.size(); }
    void for_each(const std::function<void(const lattice_curve_key&, std::uint64_t)>& visit)
        const override {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            auto cells = entry(i);
            visit(lattice_curve_key(dim_, {cells.begin(), cells.end()}), values_[i]);
        }
    }
    void clear() override {
        table_.clear();
        cells_.clear();
        values_.clear();
    }
    std::unique_ptr<key_store> clone() const override {
        return std::make_unique<hash_store>(*this);
    }

private:
    static constexpr std::uint32_t empty = UINT32_MAX;

    std::span<const lattice_coord> entry(std::size_t i) const {
        return {cells_.data() + i * stride_, stride_};
    }

    // Slot holding `cells`, or the empty slot where it would go.
    std::size_t probe(std::span<const lattice_coord> cells) const {
        if (table_.empty()) {
            return 0;
        }
        const std::size_t mask = table_.size() - 1;
        std::size_t slot = hash_cells(cells) & mask;
        while (table_[slot] != empty) {
            auto e = entry(table_[slot]);
            if (cells.size() == stride_ && std::equal(e.begin(), e.end(), cells.begin())) {
                return slot;
            }
            slot = (slot + 1) & mask;
        }
        return slot;
    }

    // Backward-shift deletion keeps probe chains intact without tombstones.
    void remove_slot(std::size_t hole) {
        const std::size_t mask = table_.size() - 1;
        std::size_t next = (hole + 1) & mask;
        while (table_[next] != empty) {
            const std::size_t home = hash_cells(entry(table_[next])) & mask;
            if (((next - home) & mask) >= ((next - hole) & mask)) {
                table_[hole] = table_[next];
                hole = next;
            }
            next = (next + 1) & mask;
        }
        table_[hole] = empty;
    }

    void rehash(std::size_t slots) {
        table_.assign(slots, empty);
        const std::size_t mask = slots - 1;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            std::size_t slot = hash_cells(entry(i)) & mask;
            while (table_[slot] != empty) {
                slot = (slot + 1) & mask;
            }
            table_[slot] = static_cast<std::uint32_t>(i);
        }
    }

    std::size_t dim_ = 1;
    std::size_t stride_ = 0;
    std::vector<std::uint32_t> table_;
    std::vector<lattice_coord> cells_;
    std::vector<std::uint64_t> values_;
};

// Compares stored lattice vertices with spans of a probe key.
struct vertex_less {
    using is_transparent = void;

    static bool less(std::span<const lattice_coord> a, std::span<const lattice_coord> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
    bool operator()(const lattice_point& a, const lattice_point& b) const {
        return less(a.coords, b.coords);
    }
    bool operator()(const lattice_point& a, std::span<const lattice_coord> b) const {
        return less(a.coords, b);
    }
    bool operator()(std::span<const lattice_coord> a, const lattice_point& b) const {
        return less(a, b.coords);
    }
};

// One tree level per curve vertex; children ordered by lattice vertex.
class trie_store final : public key_store {
public:
    trie_store() { nodes_.emplace_back(); }

    const std::uint64_t* find(const lattice_curve_key& key) const override {
        const auto idx = walk(key);
        if (!idx || !nodes_[*idx].terminal) {
            return nullptr;
        }
        return &nodes_[*idx].value;
    }
    std::uint64_t* find(const lattice_curve_key& key) override {
        const auto idx = walk(key);
        if (!idx || !nodes_[*idx].terminal) {
            return nullptr;
        }
        return &nodes_[*idx].value;
    }

    std::pair<std::uint64_t*, bool> try_emplace(const lattice_curve_key& key,
                                                std::uint64_t value) override {
        std::uint32_t cur = 0;
        for (std::size_t i = 0; i < key.size(); ++i) {
            const auto v = key.vertex(i);
            auto it = nodes_[cur].children.find(v);
            if (it != nodes_[cur].children.end()) {
                cur = it->second;
                continue;
            }
            const std::uint32_t child = allocate(cur);
            nodes_[cur].children.emplace(lattice_point{{v.begin(), v.end()}}, child);
            cur = child;
        }
        node& n = nodes_[cur];
        if (n.terminal) {
            return {&n.value, false};
        }
        n.terminal = true;
        n.value = value;
        ++size_;
        return {&n.value, true};
    }

    bool erase(const lattice_curve_key& key) override {
        const auto idx = walk(key);
        if (!idx || !nodes_[*idx].terminal) {
            return false;
        }
        std::uint32_t cur = *idx;
        nodes_[cur].terminal = false;
        --size_;
        // Prune the now-dead chain back toward the root.
        std::size_t depth = key.size();
        while (cur != 0 && !nodes_[cur].terminal && nodes_[cur].children.empty()) {
            const std::uint32_t parent = nodes_[cur].parent;
            nodes_[parent].children.erase(nodes_[parent].children.find(key.vertex(depth - 1)));
            release(cur);
            cur = parent;
            --depth;
        }
        return true;
    }

    std::size_t size() const override { return size_; }
    std::size_t node_count() const override { return nodes_.size() - 1 - free_.size(); }

    void for_each(const std::function<void(const lattice_curve_key&, std::uint64_t)>& visit)
        const override {
        lattice_curve_key key;
        visit_from(0, key, visit);
    }

    void clear() override {
        nodes_.clear();
        free_.clear();
        nodes_.emplace_back();
        size_ = 0;
    }

    std::unique_ptr<key_store> clone() const override {
        return std::make_unique<trie_store>(*this);
    }

private:
    struct node {
        std::map<lattice_point, std::uint32_t, vertex_less> children;
        std::uint32_t parent = 0;
        bool terminal = false;
        std::uint64_t value = 0;
    };

    std::optional<std::uint32_t> walk(const lattice_curve_key& key) const {
        std::uint32_t cur = 0;
        for (std::size_t i = 0; i < key.size(); ++i) {
            const auto& children = nodes_[cur].children;
            auto it = children.find(key.vertex(i));
            if (it == children.end()) {
                return std::nullopt;
            }
            cur = it->second;
        }
        return cur;
    }

    std::uint32_t allocate(std::uint32_t parent) {
        std::uint32_t idx;
        if (!free_.empty()) {
            idx = free_.back();
            free_.pop_back();
            nodes_[idx] = node{};
        } else {
            if (nodes_.size() >= UINT32_MAX) {
                throw capacity_error("prefix tree node limit reached");
            }
            idx = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();
        }
        nodes_[idx].parent = parent;
        return idx;
    }

    void release(std::uint32_t idx) {
        nodes_[idx] = node{};
        free_.push_back(idx);
    }

    void visit_from(std::uint32_t idx, lattice_curve_key& key,
                    const std::function<void(const lattice_curve_key&, std::uint64_t)>& visit)
        const {
        const node& n = nodes_[idx];
        if (n.terminal) {
            visit(key, n.value);
        }
        for (const auto& [vertex, child] : n.children) {
            key.dim = vertex.dim();
            key.cells.insert(key.cells.end(), vertex.coords.begin(), vertex.coords.end());
            visit_from(child, key, visit);
            key.cells.resize(key.cells.size() - vertex.dim());
        }
    }

    std::vector<node> nodes_;
    std::vector<std::uint32_t> free_;
    std::size_t size_ = 0;
};

} // namespace

std::unique_ptr<key_store> make_key_store(backend_kind kind) {
    if (kind == backend_kind::prefix_tree) {
        return std::make_unique<trie_store>();
    }
    return std::make_unique<hash_store>();
}

dictionary::dictionary(dict_header header, backend_kind backend)
    : header_(header), backend_(backend), store_(make_key_store(backend)) {
    if (header_.dim == 0 || header_.out_len == 0) {
        throw config_error("dictionary dimension and key length must be positive");
    }
}

dictionary::dictionary(const dictionary& other)
    : header_(other.header_),
      backend_(other.backend_),
      store_(other.store_->clone()),
      names_(other.names_),
      name_index_(other.name_index_) {}

dictionary& dictionary::operator=(const dictionary& other) {
    if (this != &other) {
        dictionary tmp(other);
        *this = std::move(tmp);
    }
    return *this;
}

void dictionary::require_key(const lattice_curve_key& key) const {
    if (key.dim != header_.dim || key.size() != header_.out_len ||
        key.cells.size() != header_.dim * header_.out_len) {
        throw dimension_error("key of length " + std::to_string(key.size()) + " in dimension " +
                              std::to_string(key.dim) + " does not fit a dictionary of length " +
                              std::to_string(header_.out_len) + " in dimension " +
                              std::to_string(header_.dim));
    }
}

void dictionary::require_mode(dict_mode m, const char* op) const {
    if (header_.mode != m) {
        throw mode_error(std::string(op) + " is not available in this dictionary mode");
    }
}

std::uint64_t dictionary::intern(std::string_view id) {
    // Builds insert one curve's keys in a row.
    if (!names_.empty() && names_.back() == id) {
        return names_.size() - 1;
    }
    auto it = name_index_.find(std::string(id));
    if (it != name_index_.end()) {
        return it->second;
    }
    const std::uint64_t h = names_.size();
    names_.emplace_back(id);
    name_index_.emplace(names_.back(), h);
    return h;
}

bool dictionary::insert_first_wins(const lattice_curve_key& key, std::string_view id) {
    require_mode(dict_mode::near_neighbor, "insert_first_wins");
    require_key(key);
    return store_->try_emplace(key, intern(id)).second;
}

void dictionary::assign(const lattice_curve_key& key, std::string_view id) {
    require_mode(dict_mode::near_neighbor, "assign");
    require_key(key);
    const auto h = intern(id);
    auto [slot, inserted] = store_->try_emplace(key, h);
    if (!inserted) {
        *slot = h;
    }
}

std::uint64_t dictionary::increment(const lattice_curve_key& key) {
    require_mode(dict_mode::range_count, "increment");
    require_key(key);
    auto [slot, inserted] = store_->try_emplace(key, 1);
    return inserted ? 1 : ++*slot;
}

std::uint64_t dictionary::decrement(const lattice_curve_key& key) {
    require_mode(dict_mode::range_count, "decrement");
    require_key(key);
    auto* slot = store_->find(key);
    if (slot == nullptr) {
        throw lookup_error("decrement of an absent key");
    }
    if (--*slot == 0) {
        store_->erase(key);
        return 0;
    }
    return *slot;
}

bool dictionary::erase(const lattice_curve_key& key) {
    require_key(key);
    return store_->erase(key);
}

std::optional<payload> dictionary::lookup(const lattice_curve_key& key) const {
    if (key.dim != header_.dim || key.size() != header_.out_len) {
        return std::nullopt;
    }
    const auto* slot = store_->find(key);
    if (slot == nullptr) {
        return std::nullopt;
    }
    if (header_.mode == dict_mode::range_count) {
        return payload::counter(*slot);
    }
    return payload::curve_id(names_[*slot]);
}

std::vector<std::pair<lattice_curve_key, payload>> dictionary::entries() const {
    std::vector<std::pair<lattice_curve_key, std::uint64_t>> raw;
    raw.reserve(store_->size());
    store_->for_each([&](const lattice_curve_key& k, std::uint64_t v) { raw.emplace_back(k, v); });
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<lattice_curve_key, payload>> out;
    out.reserve(raw.size());
    for (auto& [k, v] : raw) {
        out.emplace_back(std::move(k), header_.mode == dict_mode::range_count
                                           ? payload::counter(v)
                                           : payload::curve_id(names_[v]));
    }
    return out;
}

void dictionary::write(std::ostream& os) const {
    os.write(dict_magic, 4);
    io::put_u32(os, dict_format_version);
    io::put_u8(os, static_cast<std::uint8_t>(header_.mode));
    io::put_f64(os, header_.p);
    io::put_f64(os, header_.epsilon);
    io::put_f64(os, header_.r);
    io::put_u64(os, header_.dim);
    io::put_u64(os, header_.out_len);
    io::put_f64(os, header_.edge);

    const auto all = entries();
    io::put_u64(os, all.size());
    for (const auto& [key, pl] : all) {
        for (auto c : key.cells) {
            io::put_i64(os, c);
        }
        if (pl.is_count()) {
            io::put_u64(os, pl.count());
        } else {
            io::put_string(os, pl.id());
        }
    }
}

dictionary dictionary::read(std::istream& is, backend_kind backend) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || !std::equal(magic, magic + 4, dict_magic)) {
        throw format_error("not an ANNC dictionary (bad magic)");
    }
    return read_after_magic(is, backend);
}

dictionary dictionary::read_after_magic(std::istream& is, backend_kind backend) {
    const std::uint32_t version = io::get_u32(is);
    if (version != dict_format_version) {
        throw format_error("unsupported dictionary format version " + std::to_string(version));
    }
    dict_header h;
    const std::uint8_t mode = io::get_u8(is);
    if (mode > 1) {
        throw format_error("unknown dictionary mode " + std::to_string(mode));
    }
    h.mode = static_cast<dict_mode>(mode);
    h.p = io::get_f64(is);
    h.epsilon = io::get_f64(is);
    h.r = io::get_f64(is);
    h.dim = io::get_u64(is);
    h.out_len = io::get_u64(is);
    h.edge = io::get_f64(is);
    if (h.dim == 0 || h.out_len == 0 || h.dim > (1u << 16) || h.out_len > (1u << 16) ||
        !(h.edge > 0.0)) {
        throw corruption_error("dictionary header holds impossible dimensions");
    }

    dictionary dict(h, backend);
    const std::uint64_t n = io::get_u64(is);
    const std::size_t width = h.dim * h.out_len;
    for (std::uint64_t e = 0; e < n; ++e) {
        lattice_curve_key key;
        key.dim = h.dim;
        key.cells.resize(width);
        for (auto& c : key.cells) {
            c = io::get_i64(is);
        }
        bool inserted;
        if (h.mode == dict_mode::range_count) {
            const std::uint64_t count = io::get_u64(is);
            if (count == 0) {
                throw corruption_error("stored count of zero");
            }
            inserted = dict.store_->try_emplace(std::move(key), count).second;
        } else {
            const std::string id = io::get_string(is);
            inserted = dict.store_->try_emplace(std::move(key), dict.intern(id)).second;
        }
        if (!inserted) {
            throw corruption_error("duplicate key in dictionary body");
        }
    }
    return dict;
}

void dictionary::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw error("cannot open '" + path.string() + "' for writing");
    }
    write(os);
    if (!os) {
        throw error("failed writing '" + path.string() + "'");
    }
}

dictionary dictionary::load(const std::filesystem::path& path, backend_kind backend) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw error("cannot open '" + path.string() + "'");
    }
    return read(is, backend);
}

} // namespace annc
