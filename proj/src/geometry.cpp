#include "annc/geometry.hpp"

#include "annc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace annc {

namespace {

void require_finite(std::span<const double> coords) {
    for (double c : coords) {
        if (!std::isfinite(c)) {
            throw structural_error("coordinate is not finite");
        }
    }
}

} // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension " << a << " does not match " << b;
        throw dimension_error(os.str());
    }
}

point::point(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) {
        throw structural_error("point must have at least one coordinate");
    }
    require_finite(coords_);
}

curve::curve(std::string id, std::size_t dim, std::vector<double> coords)
    : id_(std::move(id)), dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) {
        throw structural_error("curve dimension must be at least 1");
    }
    if (coords_.empty() || coords_.size() % dim_ != 0) {
        throw structural_error("curve '" + id_ + "' must hold a positive multiple of " +
                               std::to_string(dim_) + " coordinates");
    }
    require_finite(coords_);
}

curve::curve(std::string id, const std::vector<point>& points) : id_(std::move(id)) {
    if (points.empty()) {
        throw structural_error("curve '" + id_ + "' has no points");
    }
    dim_ = points.front().dim();
    if (dim_ == 0) {
        throw structural_error("curve dimension must be at least 1");
    }
    coords_.reserve(points.size() * dim_);
    for (const auto& p : points) {
        require_same_dim(p.dim(), dim_, "curve vertex");
        coords_.insert(coords_.end(), p.coords().begin(), p.coords().end());
    }
}

std::vector<point> curve::points() const {
    std::vector<point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto v = vertex(i);
        out.emplace_back(std::vector<double>(v.begin(), v.end()));
    }
    return out;
}

metric::metric(double p) : p_(p) {
    if (!(p >= 1.0)) {
        throw config_error("metric exponent p must be >= 1");
    }
}

metric::kind metric::family() const noexcept {
    if (std::isinf(p_)) {
        return kind::frechet;
    }
    return p_ == 1.0 ? kind::time_warping : kind::general;
}

double metric::pair_cost(std::span<const double> a, std::span<const double> b) const {
    const double sq = squared_distance(a, b);
    if (p_ == 2.0) {
        return sq;
    }
    const double d = std::sqrt(sq);
    if (p_ == 1.0 || std::isinf(p_)) {
        return d;
    }
    return std::pow(d, p_);
}

double metric::finish(double aggregated) const {
    if (p_ == 1.0 || std::isinf(p_)) {
        return aggregated;
    }
    if (p_ == 2.0) {
        return std::sqrt(aggregated);
    }
    return std::pow(aggregated, 1.0 / p_);
}

double metric::budget(double radius) const {
    if (p_ == 1.0 || std::isinf(p_)) {
        return radius;
    }
    if (p_ == 2.0) {
        return radius * radius;
    }
    return std::pow(radius, p_);
}

metric metric::parse(std::string_view text) {
    if (text == "dfd") {
        return dfd();
    }
    if (text == "dtw") {
        return dtw();
    }
    if (text.substr(0, 2) == "p=") {
        const std::string value(text.substr(2));
        if (value == "inf") {
            return dfd();
        }
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == value.size() && used != 0) {
            return metric(p);
        }
    }
    throw config_error("unknown metric '" + std::string(text) + "' (expected dfd, dtw or p=<real>)");
}

std::string metric::name() const {
    switch (family()) {
    case kind::frechet:
        return "dfd";
    case kind::time_warping:
        return "dtw";
    default: {
        std::ostringstream os;
        os << "p=" << p_;
        return os.str();
    }
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

bool is_valid_alignment(const alignment& tau, std::size_t m1, std::size_t m2) {
    const auto& pr = tau.pairs;
    if (pr.empty() || pr.front() != std::pair<std::size_t, std::size_t>{1, 1} ||
        pr.back() != std::pair<std::size_t, std::size_t>{m1, m2}) {
        return false;
    }
    for (std::size_t k = 1; k < pr.size(); ++k) {
        const auto di = pr[k].first - pr[k - 1].first;
        const auto dj = pr[k].second - pr[k - 1].second;
        const bool ok = pr[k].first >= pr[k - 1].first && pr[k].second >= pr[k - 1].second &&
                        di <= 1 && dj <= 1 && (di + dj) >= 1;
        if (!ok) {
            return false;
        }
    }
    return true;
}

bool has_redundant_pair(const alignment& tau) {
    const auto& pr = tau.pairs;
    for (std::size_t k = 1; k + 1 < pr.size(); ++k) {
        const bool in_i = pr[k].first == pr[k - 1].first + 1 && pr[k].second == pr[k - 1].second;
        const bool in_j = pr[k].first == pr[k - 1].first && pr[k].second == pr[k - 1].second + 1;
        const bool out_i = pr[k + 1].first == pr[k].first + 1 && pr[k + 1].second == pr[k].second;
        const bool out_j = pr[k + 1].first == pr[k].first && pr[k + 1].second == pr[k].second + 1;
        if ((in_j && out_i) || (in_i && out_j)) {
            return true;
        }
    }
    return false;
}

double alignment_cost(const alignment& tau, curve_view p, curve_view q, const metric& m) {
    require_same_dim(p.dim, q.dim, "alignment_cost");
    if (!is_valid_alignment(tau, p.size(), q.size())) {
        throw structural_error("not a valid alignment for curves of lengths " +
                               std::to_string(p.size()) + " and " + std::to_string(q.size()));
    }
    double acc = 0.0;
    for (const auto& [i, j] : tau.pairs) {
        const double c = m.pair_cost(p.vertex(i - 1), q.vertex(j - 1));
        acc = m.is_dfd() ? std::max(acc, c) : acc + c;
    }
    return m.finish(acc);
}

double distance(curve_view p, curve_view q, const metric& m) {
    require_same_dim(p.dim, q.dim, "distance");
    const std::size_t n1 = p.size();
    const std::size_t n2 = q.size();
    const bool frechet = m.is_dfd();

    // Row-by-row over p; row[j] is the optimal cost of p[0..i] against q[0..j].
    std::array<double, 16> small{};
    std::vector<double> large;
    double* row = small.data();
    if (n2 > small.size()) {
        large.assign(n2, 0.0);
        row = large.data();
    }
    for (std::size_t i = 0; i < n1; ++i) {
        const auto pi = p.vertex(i);
        double left = 0.0;
        double diag = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const double c = m.pair_cost(pi, q.vertex(j));
            double v = c;
            if (i != 0 || j != 0) {
                double best;
                if (i == 0) {
                    best = left;
                } else if (j == 0) {
                    best = row[0];
                } else {
                    best = std::min({row[j], diag, left});
                }
                v = frechet ? std::max(best, c) : best + c;
            }
            diag = row[j];
            row[j] = v;
            left = v;
        }
    }
    return m.finish(row[n2 - 1]);
}

namespace {

void extend_alignment(alignment& tau, std::size_t m1, std::size_t m2, bool non_redundant_only,
                      const std::function<void(const alignment&)>& visit) {
    const auto [i, j] = tau.pairs.back();
    if (i == m1 && j == m2) {
        if (!non_redundant_only || !has_redundant_pair(tau)) {
            visit(tau);
        }
        return;
    }
    const std::pair<std::size_t, std::size_t> steps[] = {{i + 1, j}, {i, j + 1}, {i + 1, j + 1}};
    for (const auto& next : steps) {
        if (next.first > m1 || next.second > m2) {
            continue;
        }
        tau.pairs.push_back(next);
        extend_alignment(tau, m1, m2, non_redundant_only, visit);
        tau.pairs.pop_back();
    }
}

} // namespace

void for_each_alignment(std::size_t m1, std::size_t m2, bool non_redundant_only,
                        const std::function<void(const alignment&)>& visit) {
    if (m1 == 0 || m2 == 0) {
        throw structural_error("alignment lengths must be positive");
    }
    if (m1 + m2 > max_enumerated_alignment_size) {
        throw capacity_error("alignment enumeration limited to m1 + m2 <= " +
                             std::to_string(max_enumerated_alignment_size));
    }
    alignment tau;
    tau.pairs.reserve(m1 + m2);
    tau.pairs.emplace_back(1, 1);
    extend_alignment(tau, m1, m2, non_redundant_only, visit);
}

std::vector<alignment> enumerate_alignments(std::size_t m1, std::size_t m2,
                                            bool non_redundant_only) {
    std::vector<alignment> out;
    for_each_alignment(m1, m2, non_redundant_only,
                       [&](const alignment& tau) { out.push_back(tau); });
    return out;
}

} // namespace annc
