#include "annc/candidates.hpp"

#include "annc/errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace annc {

namespace {

using word = std::uint64_t;
constexpr std::size_t word_bits = 64;

// Relative slack on the cost budget used only for pruning partial rows. The
// exact acceptance test is geometry::distance on the finished curve.
constexpr double prune_slack = 1e-9;

std::size_t words_for(std::size_t bits) { return (bits + word_bits - 1) / word_bits; }


bool test_bit(const word* a, std::size_t bit) {
    return ((a[bit / word_bits] >> (bit % word_bits)) & 1u) != 0;
}

// base = s | (s << 1)
void spread(const word* s, word* base, std::size_t w) {
    word carry = 0;
    for (std::size_t i = 0; i < w; ++i) {
        base[i] = s[i] | (s[i] << 1) | carry;
        carry = s[i] >> (word_bits - 1);
    }
}

// Upward closure of (mask & base) inside runs of mask:
// out_i = mask_i && (base_i || out_{i-1}). Computed as
// mask & (((mask + seeds) ^ mask) | seeds) with a multi-word add.
bool fill(const word* mask, const word* base, word* out, std::size_t w) {
    word carry = 0;
    word nonzero = 0;
    for (std::size_t i = 0; i < w; ++i) {
        const word seeds = mask[i] & base[i];
        const word partial = mask[i] + seeds;
        const word c1 = partial < mask[i] ? 1 : 0;
        const word sum = partial + carry;
        const word c2 = sum < partial ? 1 : 0;
        carry = c1 | c2;
        out[i] = mask[i] & ((sum ^ mask[i]) | seeds);
        nonzero |= out[i];
    }
    return nonzero != 0;
}

struct flat_pool {
    std::size_t count = 0;
    std::vector<lattice_coord> cells; // count * d
    std::vector<double> phys;         // count * d
};

flat_pool flatten(const std::vector<lattice_point>& pool, const grid_spec& grid) {
    flat_pool fp;
    fp.count = pool.size();
    fp.cells.reserve(pool.size() * grid.dim);
    fp.phys.reserve(pool.size() * grid.dim);
    for (const auto& z : pool) {
        for (auto c : z.coords) {
            fp.cells.push_back(c);
            fp.phys.push_back(static_cast<double>(c) * grid.edge);
        }
    }
    return fp;
}

// Bit i of row v is set iff ||pool_v - c_i|| <= radius.
std::vector<word> closeness_masks(const flat_pool& pool, const curve& c, double radius,
                                  std::size_t w) {
    std::vector<word> masks(pool.count * w, 0);
    const std::size_t d = c.dim();
    for (std::size_t v = 0; v < pool.count; ++v) {
        std::span<const double> x(pool.phys.data() + v * d, d);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (euclidean_distance(c.vertex(i), x) <= radius) {
                masks[v * w + i / word_bits] |= word{1} << (i % word_bits);
            }
        }
    }
    return masks;
}

void validate(const candidate_request& req) {
    if (req.out_len == 0) {
        throw config_error("candidate length must be at least 1");
    }
    if (!(req.enum_radius >= 0.0)) {
        throw config_error("enumeration radius must be non-negative");
    }
    if (req.filter_curve.has_value() != req.filter_radius.has_value()) {
        throw config_error("filter curve and filter radius must be given together");
    }
    require_same_dim(req.anchor.dim(), req.grid.dim, "candidate anchor");
    if (req.filter_curve) {
        require_same_dim(req.filter_curve->dim(), req.grid.dim, "candidate filter curve");
        if (!(*req.filter_radius >= 0.0)) {
            throw config_error("filter radius must be non-negative");
        }
    }
}

// Shared leaf handling: exact predicate check, capacity guard, emission.
class emitter {
public:
    emitter(const candidate_request& req, const candidate_sink& sink)
        : req_(req), sink_(sink), phys_(req.out_len * req.grid.dim) {}

    // Returns whether the candidate satisfied the exact predicate.
    bool offer(std::span<const lattice_coord> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            phys_[i] = static_cast<double>(cells[i]) * req_.grid.edge;
        }
        const curve_view cand{phys_, req_.grid.dim};
        if (distance(req_.anchor, cand, req_.measure) > req_.enum_radius) {
            return false;
        }
        if (req_.filter_curve &&
            distance(*req_.filter_curve, cand, req_.measure) > *req_.filter_radius) {
            return false;
        }
        if (++emitted_ > req_.max_candidates) {
            throw capacity_error("candidate set of curve '" + req_.anchor.id() + "' exceeds " +
                                 std::to_string(req_.max_candidates) + " keys");
        }
        sink_(cells);
        return true;
    }

    std::uint64_t emitted() const noexcept { return emitted_; }

private:
    const candidate_request& req_;
    const candidate_sink& sink_;
    std::vector<double> phys_;
    std::uint64_t emitted_ = 0;
};

// Marks pool vertices in a per-depth bitmap and iterates them in pool order,
// so the search only visits vertices that can still extend the prefix.
class pool_marks {
public:
    void resize(std::size_t depths, std::size_t pool) {
        words_ = words_for(pool);
        bits_.assign(depths * words_, 0);
    }
    word* row(std::size_t depth) { return bits_.data() + depth * words_; }
    void clear(std::size_t depth) { std::fill_n(row(depth), words_, word{0}); }
    void mark(std::size_t depth, std::size_t v) {
        row(depth)[v / word_bits] |= word{1} << (v % word_bits);
    }
    template <class F>
    void for_each(std::size_t depth, F&& f) {
        word* r = row(depth);
        for (std::size_t w = 0; w < words_; ++w) {
            word bits = r[w];
            while (bits != 0) {
                const auto b = static_cast<std::size_t>(__builtin_ctzll(bits));
                bits &= bits - 1;
                f(w * word_bits + b);
            }
        }
    }

private:
    std::size_t words_ = 0;
    std::vector<word> bits_;
};

// For each vertex of `c`, the pool vertices within `radius` of it.
std::vector<std::vector<std::uint32_t>> near_lists(const flat_pool& pool, const curve& c,
                                                   double radius) {
    std::vector<std::vector<std::uint32_t>> lists(c.size());
    const std::size_t d = c.dim();
    for (std::size_t v = 0; v < pool.count; ++v) {
        std::span<const double> x(pool.phys.data() + v * d, d);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (euclidean_distance(c.vertex(i), x) <= radius) {
                lists[i].push_back(static_cast<std::uint32_t>(v));
            }
        }
    }
    return lists;
}

class frechet_search {
public:
    frechet_search(const candidate_request& req, const candidate_sink& sink)
        : req_(req), out_(req, sink) {
        pool_ = flatten(vertex_pool(req.anchor, req.enum_radius, req.grid), req.grid);
        if (pool_.count > UINT32_MAX) {
            throw capacity_error("vertex pool too large");
        }
        wa_ = words_for(req.anchor.size());
        anchor_masks_ = closeness_masks(pool_, req.anchor, req.enum_radius, wa_);
        reach_a_.assign(req.out_len * wa_, 0);
        base_a_.assign(req.out_len * wa_, 0);
        if (req.filter_curve) {
            wf_ = words_for(req.filter_curve->size());
            filter_masks_ = closeness_masks(pool_, *req.filter_curve, *req.filter_radius, wf_);
            reach_f_.assign(req.out_len * wf_, 0);
            base_f_.assign(req.out_len * wf_, 0);
            // The filter radius is the tighter one in practice; restrict by it.
            lists_ = near_lists(pool_, *req.filter_curve, *req.filter_radius);
        } else {
            lists_ = near_lists(pool_, req.anchor, req.enum_radius);
        }
        marks_.resize(req.out_len, pool_.count);
        cells_.assign(req.out_len * req.grid.dim, 0);
    }

    std::uint64_t run() {
        descend(0);
        return out_.emitted();
    }

private:
    // Pool vertices close to a vertex of the restricting curve that the next
    // column may be matched with.
    void mark_extensions(std::size_t col, const word* base) {
        marks_.clear(col);
        const std::size_t n = lists_.size();
        if (col + 1 == req_.out_len) {
            for (auto v : lists_[n - 1]) {
                marks_.mark(col, v);
            }
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (test_bit(base, i)) {
                for (auto v : lists_[i]) {
                    marks_.mark(col, v);
                }
            }
        }
    }

    void descend(std::size_t col) {
        const std::size_t d = req_.grid.dim;
        const bool last = col + 1 == req_.out_len;
        word* base_a = base_a_.data() + col * wa_;
        word* reach_a = reach_a_.data() + col * wa_;
        word* base_f = filtered() ? base_f_.data() + col * wf_ : nullptr;
        word* reach_f = filtered() ? reach_f_.data() + col * wf_ : nullptr;

        if (col == 0) {
            std::fill(base_a, base_a + wa_, 0);
            base_a[0] = 1;
            if (filtered()) {
                std::fill(base_f, base_f + wf_, 0);
                base_f[0] = 1;
            }
        } else {
            spread(reach_a - wa_, base_a, wa_);
            if (filtered()) {
                spread(reach_f - wf_, base_f, wf_);
            }
        }
        mark_extensions(col, filtered() ? base_f : base_a);

        marks_.for_each(col, [&](std::size_t v) {
            if (!fill(anchor_masks_.data() + v * wa_, base_a, reach_a, wa_)) {
                return;
            }
            if (filtered() && !fill(filter_masks_.data() + v * wf_, base_f, reach_f, wf_)) {
                return;
            }
            std::copy_n(pool_.cells.data() + v * d, d, cells_.data() + col * d);
            if (!last) {
                descend(col + 1);
                return;
            }
            const bool reach_end =
                test_bit(reach_a, req_.anchor.size() - 1) &&
                (!filtered() || test_bit(reach_f, req_.filter_curve->size() - 1));
            if (reach_end && !out_.offer(cells_)) {
                throw std::logic_error("free-space reachability disagrees with distance()");
            }
        });
    }

    bool filtered() const noexcept { return wf_ != 0; }

    const candidate_request& req_;
    emitter out_;
    flat_pool pool_;
    std::size_t wa_ = 0;
    std::size_t wf_ = 0;
    std::vector<word> anchor_masks_, filter_masks_;
    std::vector<word> reach_a_, base_a_, reach_f_, base_f_;
    std::vector<std::vector<std::uint32_t>> lists_;
    pool_marks marks_;
    std::vector<lattice_coord> cells_;
};

class lp_search {
public:
    lp_search(const candidate_request& req, const candidate_sink& sink)
        : req_(req), out_(req, sink) {
        pool_ = flatten(vertex_pool(req.anchor, req.enum_radius, req.grid), req.grid);
        if (pool_.count > UINT32_MAX) {
            throw capacity_error("vertex pool too large");
        }
        m_ = req.anchor.size();
        budget_ = req.measure.budget(req.enum_radius) * (1.0 + prune_slack);
        const std::size_t d = req.grid.dim;
        costs_.resize(pool_.count * m_);
        by_cost_.resize(m_);
        for (std::size_t v = 0; v < pool_.count; ++v) {
            std::span<const double> x(pool_.phys.data() + v * d, d);
            for (std::size_t i = 0; i < m_; ++i) {
                const double c = req.measure.pair_cost(req.anchor.vertex(i), x);
                costs_[v * m_ + i] = c;
                if (c <= budget_) {
                    by_cost_[i].emplace_back(c, static_cast<std::uint32_t>(v));
                }
            }
        }
        for (auto& list : by_cost_) {
            std::sort(list.begin(), list.end());
        }
        rows_.assign(req.out_len * m_, 0.0);
        marks_.resize(req.out_len, pool_.count);
        cells_.assign(req.out_len * d, 0);
    }

    std::uint64_t run() {
        descend(0);
        return out_.emitted();
    }

private:
    // Every entry of the next column is at least the pair cost of its anchor
    // vertex plus the prefix minimum of the previous column, so a vertex can
    // only survive if some anchor vertex i has cost <= budget - prefix_min(i).
    // The final column must additionally end at the last anchor vertex.
    void mark_extensions(std::size_t col, const double* prev) {
        marks_.clear(col);
        const bool last = col + 1 == req_.out_len;
        double prefix_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
            const double floor = prev == nullptr ? 0.0 : (prefix_min = std::min(prefix_min, prev[i]));
            if (last && i + 1 != m_) {
                continue;
            }
            const double allowance = budget_ - floor;
            if (allowance < 0.0) {
                continue;
            }
            const auto& list = by_cost_[i];
            auto end = std::upper_bound(list.begin(), list.end(),
                                        std::pair{allowance, UINT32_MAX});
            for (auto it = list.begin(); it != end; ++it) {
                marks_.mark(col, it->second);
            }
        }
    }

    void descend(std::size_t col) {
        const std::size_t d = req_.grid.dim;
        const bool last = col + 1 == req_.out_len;
        double* row = rows_.data() + col * m_;
        const double* prev = col == 0 ? nullptr : row - m_;
        mark_extensions(col, prev);

        marks_.for_each(col, [&](std::size_t v) {
            const double* c = costs_.data() + v * m_;
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                double best;
                if (prev == nullptr) {
                    best = i == 0 ? 0.0 : row[i - 1];
                } else if (i == 0) {
                    best = prev[0];
                } else {
                    best = std::min({prev[i], prev[i - 1], row[i - 1]});
                }
                row[i] = best + c[i];
                lowest = std::min(lowest, row[i]);
            }
            if (lowest > budget_) {
                return;
            }
            std::copy_n(pool_.cells.data() + v * d, d, cells_.data() + col * d);
            if (!last) {
                descend(col + 1);
            } else if (row[m_ - 1] <= budget_) {
                out_.offer(cells_);
            }
        });
    }

    const candidate_request& req_;
    emitter out_;
    flat_pool pool_;
    std::size_t m_ = 0;
    double budget_ = 0.0;
    std::vector<double> costs_;
    std::vector<std::vector<std::pair<double, std::uint32_t>>> by_cost_;
    std::vector<double> rows_;
    pool_marks marks_;
    std::vector<lattice_coord> cells_;
};

candidate_set collect(const candidate_request& req) {
    candidate_set out;
    for_each_candidate(req, [&](std::span<const lattice_coord> cells) {
        out.keys.emplace_back(req.grid.dim,
                              std::vector<lattice_coord>(cells.begin(), cells.end()));
    });
    return out;
}

} // namespace

std::vector<lattice_point> vertex_pool(curve_view anchor, double radius, const grid_spec& grid) {
    require_same_dim(anchor.dim, grid.dim, "vertex_pool");
    std::vector<lattice_point> pool;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
        auto ball = grid_points_in_ball(anchor.vertex(i), radius, grid);
        pool.insert(pool.end(), std::make_move_iterator(ball.begin()),
                    std::make_move_iterator(ball.end()));
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    return pool;
}

std::uint64_t for_each_candidate(const candidate_request& req, const candidate_sink& sink) {
    validate(req);
    if (req.measure.is_dfd()) {
        return frechet_search(req, sink).run();
    }
    return lp_search(req, sink).run();
}

candidate_set enumerate_dfd(const candidate_request& req) {
    if (!req.measure.is_dfd()) {
        throw config_error("enumerate_dfd requires the discrete Frechet metric");
    }
    return collect(req);
}

candidate_set enumerate_lp(const candidate_request& req) {
    if (req.measure.is_dfd()) {
        throw config_error("enumerate_lp requires a finite exponent p");
    }
    return collect(req);
}

candidate_set enumerate_candidates(const candidate_request& req) { return collect(req); }

} // namespace annc
