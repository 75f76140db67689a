#include "annc/index.hpp"

#include "annc/errors.hpp"
#include "annc/simplify.hpp"
#include "binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <thread>

namespace annc {

namespace {

constexpr char registry_magic[4] = {'R', 'E', 'G', 'S'};
// Section 4 fixes the simplification accuracy at eps = 1, so d(C, Pi) <= 2r.
constexpr double simplify_eps = 1.0;

double generation_radius(const index_params& p) { return (1.0 + p.epsilon / 2.0) * p.r; }
double asymmetric_radius(const index_params& p) { return 4.0 * p.r; }

double encode_p(const metric& m) { return m.is_dfd() ? 0.0 : m.p(); }
metric decode_p(double p) { return p == 0.0 ? metric::dfd() : metric(p); }

} // namespace

void index_params::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw config_error("epsilon must lie in (0, 1]");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw config_error("radius must be positive and finite");
    }
    if (asymmetric_k) {
        if (!measure.is_dfd()) {
            throw config_error("the asymmetric variant supports the discrete Frechet distance only");
        }
        if (*asymmetric_k == 0) {
            throw config_error("asymmetric k must be positive");
        }
        if (all_lengths ||
            std::any_of(query_lengths.begin(), query_lengths.end(),
                        [&](std::size_t l) { return l != *asymmetric_k; })) {
            throw config_error("asymmetric queries must have length k");
        }
    }
    if (std::find(query_lengths.begin(), query_lengths.end(), 0) != query_lengths.end()) {
        throw config_error("query lengths must be positive");
    }
    if (max_candidates == 0) {
        throw config_error("candidate limit must be positive");
    }
}

curve_index::curve_index(curve_index&& other) noexcept
    : params_(std::move(other.params_)),
      dim_(other.dim_),
      max_input_len_(other.max_input_len_),
      blocks_(std::move(other.blocks_)),
      curves_(std::move(other.curves_)),
      positions_(std::move(other.positions_)),
      stats_(std::move(other.stats_)),
      lookups_(other.lookups_.load()) {}

curve_index& curve_index::operator=(curve_index&& other) noexcept {
    params_ = std::move(other.params_);
    dim_ = other.dim_;
    max_input_len_ = other.max_input_len_;
    blocks_ = std::move(other.blocks_);
    curves_ = std::move(other.curves_);
    positions_ = std::move(other.positions_);
    stats_ = std::move(other.stats_);
    lookups_ = other.lookups_.load();
    return *this;
}

// An alignment of curves of lengths m and L has at most m + L - 1 pairs, and
// the finite-p grid must cover 2 * m_norm of them. With equal lengths this is L.
std::size_t curve_index::m_norm_for(std::size_t length) const {
    return (max_input_len_ + length) / 2;
}

std::optional<curve> curve_index::simplification(const curve& c) const {
    return simplify_dfd(c, *params_.asymmetric_k, params_.r, simplify_eps).simplified;
}

candidate_request curve_index::request_for(const curve& c, std::size_t length) const {
    candidate_request req;
    req.out_len = length;
    req.grid = blocks_.at(length).grid;
    req.measure = params_.measure;
    req.max_candidates = params_.max_candidates;
    req.anchor = c;
    req.enum_radius = generation_radius(params_);
    return req;
}

std::optional<std::vector<candidate_request>> curve_index::requests(const curve& c) const {
    std::optional<curve> pi;
    if (params_.asymmetric_k) {
        pi = simplification(c);
        if (!pi) {
            return std::nullopt;
        }
    }
    std::vector<candidate_request> out;
    for (const auto& [l, b] : blocks_) {
        auto req = request_for(c, l);
        if (pi) {
            req.anchor = *pi;
            req.enum_radius = asymmetric_radius(params_);
            req.filter_curve = c;
            req.filter_radius = generation_radius(params_);
        }
        out.push_back(std::move(req));
    }
    return out;
}

std::optional<std::map<std::size_t, candidate_set>> curve_index::candidate_sets(
    const curve& c) const {
    auto reqs = requests(c);
    if (!reqs) {
        return std::nullopt;
    }
    std::map<std::size_t, candidate_set> sets;
    for (const auto& req : *reqs) {
        sets[req.out_len] = enumerate_candidates(req);
    }
    return sets;
}

void curve_index::fold(dictionary& dict, const lattice_curve_key& key, const std::string& id) {
    if (params_.mode == dict_mode::near_neighbor) {
        dict.insert_first_wins(key, id);
    } else {
        dict.increment(key);
    }
}

void curve_index::record(const curve& c, bool skipped, std::map<std::size_t, std::uint64_t> sizes) {
    for (const auto& [l, n] : sizes) {
        stats_.candidates += n;
    }
    if (skipped) {
        stats_.skipped.push_back(c.id());
    }
    stats_.per_curve.emplace_back(c.id(), std::move(sizes));
}

void curve_index::admit(const curve& c) {
    if (c.size() == 0) {
        throw structural_error("curve '" + c.id() + "' has no vertices");
    }
    require_same_dim(c.dim(), dim_, "curve dimension");
    if (positions_.count(c.id()) != 0) {
        throw config_error("duplicate curve id '" + c.id() + "'");
    }
    positions_.emplace(c.id(), curves_.size());
    curves_.push_back(c);
}

curve_index curve_index::build(const std::vector<curve>& curves, const index_params& params) {
    params.validate();
    if (curves.empty()) {
        throw config_error("cannot build an index over no curves");
    }
    curve_index idx;
    idx.params_ = params;
    idx.dim_ = curves.front().dim();
    for (const auto& c : curves) {
        idx.admit(c);
        idx.max_input_len_ = std::max(idx.max_input_len_, c.size());
    }

    std::vector<std::size_t> lengths = params.query_lengths;
    if (params.asymmetric_k) {
        lengths = {*params.asymmetric_k};
    } else if (params.all_lengths) {
        for (std::size_t l = 1; l <= idx.max_input_len_; ++l) {
            lengths.push_back(l);
        }
    } else if (lengths.empty()) {
        lengths = {idx.max_input_len_};
    }
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
    // Index blocks record their own length, so remember the caller's choice verbatim.
    idx.params_.query_lengths = lengths;
    idx.params_.all_lengths = false;

    for (auto l : lengths) {
        auto grid = grid_spec::make(params.epsilon, params.r, idx.dim_, idx.m_norm_for(l),
                                    params.measure);
        dict_header h{params.mode, encode_p(params.measure), params.epsilon, params.r, idx.dim_,
                      l, grid.edge};
        idx.blocks_.emplace(l, block{grid, dictionary(h, params.backend)});
    }

    const std::size_t threads = std::max(1u, params.threads);
    const std::size_t n = idx.curves_.size();
    if (threads == 1) {
        // Stream each candidate straight into its dictionary.
        lattice_curve_key key;
        key.dim = idx.dim_;
        for (const auto& c : idx.curves_) {
            auto reqs = idx.requests(c);
            std::map<std::size_t, std::uint64_t> sizes;
            for (const auto& req : reqs.value_or(std::vector<candidate_request>{})) {
                auto& dict = idx.blocks_.at(req.out_len).dict;
                sizes[req.out_len] =
                    for_each_candidate(req, [&](std::span<const lattice_coord> cells) {
                        key.cells.assign(cells.begin(), cells.end());
                        idx.fold(dict, key, c.id());
                    });
            }
            idx.record(c, !reqs, std::move(sizes));
        }
        return idx;
    }

    // Candidate sets are enumerated in parallel batches and folded in input
    // order, so first-wins payloads do not depend on the thread count.
    for (std::size_t begin = 0; begin < n; begin += threads) {
        const std::size_t end = std::min(n, begin + threads);
        std::vector<std::optional<std::map<std::size_t, candidate_set>>> sets(end - begin);
        std::vector<std::exception_ptr> errors(end - begin);
        std::vector<std::thread> pool;
        for (std::size_t s = 0; s < end - begin; ++s) {
            pool.emplace_back([&, s] {
                try {
                    sets[s] = idx.candidate_sets(idx.curves_[begin + s]);
                } catch (...) {
                    errors[s] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (std::size_t s = 0; s < end - begin; ++s) {
            if (errors[s]) {
                std::rethrow_exception(errors[s]);
            }
            const curve& c = idx.curves_[begin + s];
            std::map<std::size_t, std::uint64_t> sizes;
            if (sets[s]) {
                for (auto& [l, set] : *sets[s]) {
                    auto& dict = idx.blocks_.at(l).dict;
                    for (const auto& key : set.keys) {
                        idx.fold(dict, key, c.id());
                    }
                    sizes[l] = set.size();
                    set.keys = {};
                }
            }
            idx.record(c, !sets[s], std::move(sizes));
        }
    }
    return idx;
}

std::vector<std::size_t> curve_index::query_lengths() const {
    std::vector<std::size_t> out;
    for (const auto& [l, b] : blocks_) {
        out.push_back(l);
    }
    return out;
}

const grid_spec& curve_index::grid(std::size_t length) const {
    auto it = blocks_.find(length);
    if (it == blocks_.end()) {
        throw lookup_error("unsupported query length " + std::to_string(length));
    }
    return it->second.grid;
}

const dictionary& curve_index::dict(std::size_t length) const {
    auto it = blocks_.find(length);
    if (it == blocks_.end()) {
        throw lookup_error("unsupported query length " + std::to_string(length));
    }
    return it->second.dict;
}

std::size_t curve_index::dictionary_size() const {
    std::size_t n = 0;
    for (const auto& [l, b] : blocks_) {
        n += b.dict.size();
    }
    return n;
}

const curve_index::block& curve_index::block_for(const curve& q) const {
    require_same_dim(q.dim(), dim_, "query dimension");
    auto it = blocks_.find(q.size());
    if (it == blocks_.end()) {
        throw lookup_error("unsupported query length " + std::to_string(q.size()));
    }
    return it->second;
}

query_result curve_index::query(const curve& q) const {
    if (params_.mode != dict_mode::near_neighbor) {
        throw mode_error("query needs a near-neighbor index");
    }
    const block& b = block_for(q);
    const auto key = snap_curve(q, b.grid);
    lookups_.fetch_add(1, std::memory_order_relaxed);
    query_result out;
    out.guarantee = (1.0 + params_.epsilon) * params_.r;
    if (auto hit = b.dict.lookup(key)) {
        out.id = hit->id();
    }
    return out;
}

std::uint64_t curve_index::count(const curve& q) const {
    if (params_.mode != dict_mode::range_count) {
        throw mode_error("count needs a range-counting index");
    }
    const block& b = block_for(q);
    const auto key = snap_curve(q, b.grid);
    lookups_.fetch_add(1, std::memory_order_relaxed);
    auto hit = b.dict.lookup(key);
    return hit ? hit->count() : 0;
}

bool curve_index::in_candidate_set(const curve& c, const lattice_curve_key& key) const {
    const auto& g = grid(key.size());
    const auto phys = physical(key, g);
    const curve_view q{phys, dim_};
    if (distance(c, q, params_.measure) > generation_radius(params_)) {
        return false;
    }
    if (params_.asymmetric_k) {
        auto pi = simplification(c);
        return pi && distance(*pi, q, params_.measure) <= asymmetric_radius(params_);
    }
    return true;
}

void curve_index::insert_curve(const curve& c) {
    if (params_.measure.is_finite() && c.size() > max_input_len_) {
        throw config_error("curve '" + c.id() + "' is longer than the grid was built for (" +
                           std::to_string(max_input_len_) + " vertices)");
    }
    require_same_dim(c.dim(), dim_, "curve dimension");
    if (positions_.count(c.id()) != 0) {
        throw config_error("duplicate curve id '" + c.id() + "'");
    }
    // Enumerate before touching the registry so a failed insert changes nothing.
    auto found = candidate_sets(c);
    std::map<std::size_t, candidate_set> sets;
    if (found) {
        sets = std::move(*found);
    }
    admit(c);
    std::map<std::size_t, std::uint64_t> sizes;
    for (auto& [l, set] : sets) {
        auto& dict = blocks_.at(l).dict;
        for (const auto& key : set.keys) {
            fold(dict, key, c.id());
        }
        sizes[l] = set.size();
    }
    record(c, !found, std::move(sizes));
}

void curve_index::delete_curve(const std::string& id) {
    auto pos_it = positions_.find(id);
    if (pos_it == positions_.end()) {
        throw lookup_error("unknown curve id '" + id + "'");
    }
    const std::size_t pos = pos_it->second;
    const curve victim = curves_[pos];
    auto found = candidate_sets(victim);
    curves_.erase(curves_.begin() + static_cast<std::ptrdiff_t>(pos));
    positions_.clear();
    for (std::size_t i = 0; i < curves_.size(); ++i) {
        positions_.emplace(curves_[i].id(), i);
    }

    if (found) {
        for (auto& [l, set] : *found) {
            auto& dict = blocks_.at(l).dict;
            for (const auto& key : set.keys) {
                if (params_.mode == dict_mode::range_count) {
                    dict.decrement(key);
                    continue;
                }
                auto hit = dict.lookup(key);
                if (!hit || hit->id() != id) {
                    continue;
                }
                // Hand the key to the earliest survivor that would have claimed it.
                auto heir = std::find_if(curves_.begin(), curves_.end(), [&](const curve& c) {
                    return in_candidate_set(c, key);
                });
                if (heir == curves_.end()) {
                    dict.erase(key);
                } else {
                    dict.assign(key, heir->id());
                }
            }
        }
    }

    auto& pc = stats_.per_curve;
    pc.erase(std::remove_if(pc.begin(), pc.end(), [&](const auto& e) { return e.first == id; }),
             pc.end());
    auto& sk = stats_.skipped;
    sk.erase(std::remove(sk.begin(), sk.end(), id), sk.end());
}

std::size_t curve_index::audit(std::size_t stride) const {
    stride = std::max<std::size_t>(1, stride);
    std::size_t bad = 0;
    for (const auto& [l, b] : blocks_) {
        const auto entries = b.dict.entries();
        for (std::size_t e = 0; e < entries.size(); e += stride) {
            const auto& [key, value] = entries[e];
            if (value.is_count()) {
                auto owners = static_cast<std::uint64_t>(
                    std::count_if(curves_.begin(), curves_.end(),
                                  [&](const curve& c) { return in_candidate_set(c, key); }));
                bad += owners != value.count();
            } else {
                auto first = std::find_if(curves_.begin(), curves_.end(), [&](const curve& c) {
                    return in_candidate_set(c, key);
                });
                bad += first == curves_.end() || first->id() != value.id();
            }
        }
    }
    return bad;
}

void curve_index::require_params(double epsilon, double r, const metric& m,
                                 dict_mode mode) const {
    if (epsilon != params_.epsilon || r != params_.r || encode_p(m) != encode_p(params_.measure) ||
        mode != params_.mode) {
        throw config_error("index was built with epsilon=" + std::to_string(params_.epsilon) +
                           " r=" + std::to_string(params_.r) + " metric=" +
                           params_.measure.name() + "; requested parameters differ");
    }
}

// Layout: one dictionary block per query length (each starting with "ANNC"),
// then "REGS", the asymmetric k (0 if none), the longest build-time input
// length and the curves in order: id, length, dimension, coordinates.
void curve_index::write(std::ostream& os) const {
    for (const auto& [l, b] : blocks_) {
        b.dict.write(os);
    }
    os.write(registry_magic, 4);
    io::put_u64(os, params_.asymmetric_k.value_or(0));
    io::put_u64(os, max_input_len_);
    io::put_u64(os, curves_.size());
    for (const auto& c : curves_) {
        io::put_string(os, c.id());
        io::put_u64(os, c.size());
        io::put_u64(os, c.dim());
        for (double x : c.coords()) {
            io::put_f64(os, x);
        }
    }
    if (!os) {
        throw format_error("failed to write index");
    }
}

void curve_index::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw format_error("cannot open '" + path.string() + "' for writing");
    }
    write(os);
}

curve_index curve_index::read(std::istream& is, backend_kind backend) {
    curve_index idx;
    idx.params_.backend = backend;
    bool first = true;
    while (true) {
        char magic[4];
        if (!is.read(magic, 4)) {
            throw corruption_error("index ends before its registry");
        }
        if (std::memcmp(magic, dict_magic, 4) == 0) {
            auto dict = dictionary::read_after_magic(is, backend);
            const auto& h = dict.header();
            if (first) {
                idx.params_.mode = h.mode;
                idx.params_.measure = decode_p(h.p);
                idx.params_.epsilon = h.epsilon;
                idx.params_.r = h.r;
                idx.dim_ = h.dim;
                first = false;
            } else if (h.mode != idx.params_.mode || h.p != encode_p(idx.params_.measure) ||
                       h.epsilon != idx.params_.epsilon || h.r != idx.params_.r ||
                       h.dim != idx.dim_) {
                throw corruption_error("index blocks disagree on their parameters");
            }
            if (idx.blocks_.count(h.out_len) != 0) {
                throw corruption_error("index holds two blocks of length " +
                                       std::to_string(h.out_len));
            }
            idx.blocks_.emplace(h.out_len, block{grid_spec{}, std::move(dict)});
            continue;
        }
        if (std::memcmp(magic, registry_magic, 4) != 0) {
            if (first) {
                throw format_error("not an index file (bad magic)");
            }
            throw corruption_error("unknown index section");
        }
        break;
    }
    if (first) {
        throw corruption_error("index has no dictionary blocks");
    }
    if (const auto k = io::get_u64(is); k != 0) {
        idx.params_.asymmetric_k = k;
    }
    idx.max_input_len_ = io::get_u64(is);
    const auto n = io::get_u64(is);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto id = io::get_string(is);
        const auto len = io::get_u64(is);
        const auto d = io::get_u64(is);
        if (d != idx.dim_ || len == 0 || len > (std::uint64_t{1} << 32)) {
            throw corruption_error("registry curve '" + id + "' has an impossible shape");
        }
        std::vector<double> coords(len * d);
        for (auto& x : coords) {
            x = io::get_f64(is);
        }
        try {
            idx.admit(curve(std::move(id), d, std::move(coords)));
        } catch (const error& e) {
            throw corruption_error(std::string("bad registry entry: ") + e.what());
        }
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw corruption_error("trailing bytes after the registry");
    }

    try {
        idx.params_.validate();
    } catch (const config_error& e) {
        throw corruption_error(std::string("stored parameters are invalid: ") + e.what());
    }
    for (auto& [l, b] : idx.blocks_) {
        idx.params_.query_lengths.push_back(l);
        if (idx.params_.asymmetric_k && l != *idx.params_.asymmetric_k) {
            throw corruption_error("asymmetric index holds a block of the wrong length");
        }
        b.grid = grid_spec::make(idx.params_.epsilon, idx.params_.r, idx.dim_,
                                 idx.m_norm_for(l), idx.params_.measure);
        if (b.grid.edge != b.dict.header().edge) {
            throw corruption_error("stored grid edge does not match the index parameters");
        }
        if (idx.params_.mode == dict_mode::near_neighbor) {
            for (const auto& [key, value] : b.dict.entries()) {
                if (idx.positions_.count(value.id()) == 0) {
                    throw corruption_error("dictionary names unregistered curve '" + value.id() +
                                           "'");
                }
            }
        }
    }
    return idx;
}

curve_index curve_index::load(const std::filesystem::path& path, backend_kind backend) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw format_error("cannot open '" + path.string() + "'");
    }
    return read(is, backend);
}

} // namespace annc
