// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include "annc/candidates.hpp"
#include "annc/curve_file.hpp"
#include "annc/dictionary.hpp"
#include "annc/errors.hpp"
#include "annc/geometry.hpp"
#include "annc/grid.hpp"
#include "annc/index.hpp"
#include "annc/oracle.hpp"
#include "annc/simplify.hpp"
#include "annc/workload.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <new>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using namespace annc;

namespace {

// Per-curve, per-length candidate budget for the random suites. The largest
// buildable configurations then stay near 30M dictionary entries (~2.5 GB).
constexpr std::uint64_t suite_candidate_cap = 1'500'000;
constexpr std::uint64_t suite_seed = 7;
constexpr std::size_t suite_n = 20;
constexpr std::size_t suite_queries = 200;

struct outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("unexpected exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2d %s: %s (%s; %.1fs)\n", id, title, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

curve random_curve(std::mt19937_64& rng, std::string id, std::size_t m, std::size_t d, double lo,
                   double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> xs(m * d);
    for (auto& x : xs) {
        x = u(rng);
    }
    return curve(std::move(id), d, std::move(xs));
}

const curve& by_id(const std::vector<curve>& cs, const std::string& id) {
    for (const auto& c : cs) {
        if (c.id() == id) {
            return c;
        }
    }
    throw lookup_error("no curve " + id);
}

std::string label(const metric& m, std::size_t d, std::size_t len, double eps) {
    std::ostringstream os;
    os << m.name() << "/d=" << d << "/m=" << len << "/eps=" << eps;
    return os.str();
}

// ---------------------------------------------------------------------------
// Random suites (criteria 1, 2, 7)

struct suite_tally {
    std::size_t configs = 0;
    std::size_t built = 0;
    std::size_t queries = 0;
    std::size_t within_r = 0;  // queries with an input within r
    std::size_t band = 0;      // queries whose nearest lies in (r, (1+eps) r]
    std::size_t violations = 0;
    std::size_t false_pos = 0;
    std::vector<std::string> over_budget;
    std::size_t pi_checked = 0; // asymmetric: simplifications held by built indexes
    std::size_t pi_far = 0;
    std::size_t skipped = 0;
    std::string extra;

    std::string summary() const {
        std::ostringstream os;
        os << configs << " configs, " << built << " built, " << queries << " queries ("
           << within_r << " with a curve within r, " << band << " in the (r,(1+eps)r] band), "
           << violations << " violations, " << false_pos << " false positives";
        if (!over_budget.empty()) {
            os << ", over the " << suite_candidate_cap << " per-curve candidate budget:";
            for (const auto& s : over_budget) {
                os << " " << s;
            }
        }
        os << extra;
        return os.str();
    }
};

void run_config(suite_tally& t, const metric& m, std::size_t d, std::size_t len, double eps,
                dict_mode mode, std::size_t k) {
    ++t.configs;
    workload_spec spec;
    spec.n = suite_n;
    spec.m = len;
    spec.d = d;
    spec.queries = suite_queries;
    spec.query_len = k;
    spec.measure = m;
    spec.epsilon = eps;
    spec.seed = suite_seed;
    const auto w = make_workload(spec);

    index_params p;
    p.epsilon = eps;
    p.r = spec.r;
    p.measure = m;
    p.mode = mode;
    p.max_candidates = suite_candidate_cap;
    if (k != 0) {
        p.asymmetric_k = k;
    }
    std::optional<curve_index> idx;
    try {
        idx.emplace(curve_index::build(w.curves, p));
    } catch (const capacity_error&) {
        t.over_budget.push_back(label(m, d, len, eps) + (k ? "/k=" + std::to_string(k) : ""));
        return;
    } catch (const std::bad_alloc&) {
        t.over_budget.push_back(label(m, d, len, eps) + "(oom)");
        return;
    }
    ++t.built;
    if (k != 0) {
        for (const auto& c : w.curves) {
            if (const auto pi = idx->simplification(c)) {
                ++t.pi_checked;
                t.pi_far += distance(c, *pi, metric::dfd()) > 2.0 * p.r;
            } else {
                ++t.skipped;
            }
        }
    }
    const double outer = (1.0 + eps) * p.r;
    for (const auto& q : w.queries) {
        ++t.queries;
        const auto truth = oracle::linear_scan_nn(w.curves, q, m);
        t.within_r += truth.nearest_distance <= p.r;
        t.band += truth.nearest_distance > p.r && truth.nearest_distance <= outer;
        if (mode == dict_mode::near_neighbor) {
            const auto res = idx->query(q);
            if (truth.nearest_distance <= p.r && !res.matched()) {
                ++t.violations;
            }
            if (res.matched() && distance(by_id(w.curves, *res.id), q, m) > outer) {
                ++t.false_pos;
            }
        } else {
            const auto n = idx->count(q);
            t.violations += n < oracle::count_within(w.curves, q, m, p.r);
            t.false_pos += n > oracle::count_within(w.curves, q, m, outer);
        }
    }
}

suite_tally symmetric_suite(dict_mode mode) {
    suite_tally t;
    const std::array<metric, 3> metrics{metric::dfd(), metric::dtw(), metric(2.0)};
    for (const auto& m : metrics) {
        for (std::size_t d : {1, 2}) {
            for (std::size_t len : {2, 3, 4}) {
                for (double eps : {1.0, 0.5, 0.25}) {
                    run_config(t, m, d, len, eps, mode, 0);
                }
            }
        }
    }
    return t;
}

outcome criterion_1() {
    const auto t = symmetric_suite(dict_mode::near_neighbor);
    return {t.over_budget.empty() && t.violations == 0 && t.false_pos == 0, t.summary()};
}

outcome criterion_2() {
    suite_tally t;
    for (std::size_t k : {2, 3}) {
        for (std::size_t d : {1, 2}) {
            for (double eps : {1.0, 0.5, 0.25}) {
                run_config(t, metric::dfd(), d, 8, eps, dict_mode::near_neighbor, k);
            }
        }
    }
    t.extra = ", " + std::to_string(t.pi_checked) + " simplifications checked, " +
              std::to_string(t.pi_far) + " farther than 2r, " + std::to_string(t.skipped) +
              " inputs without a k-vertex simplification";
    return {t.over_budget.empty() && t.violations == 0 && t.false_pos == 0 && t.pi_far == 0 &&
                t.pi_checked > 0,
            t.summary()};
}

outcome criterion_7() {
    const auto t = symmetric_suite(dict_mode::range_count);
    return {t.over_budget.empty() && t.violations == 0 && t.false_pos == 0, t.summary()};
}

// ---------------------------------------------------------------------------

outcome criterion_3() {
    std::mt19937_64 rng(303);
    const std::array<metric, 3> metrics{metric::dfd(), metric::dtw(), metric(2.0)};
    // (metric, m, d) combinations whose brute-force space fits the oracle budget.
    // dtw with m = 3, d = 2 needs ~3.6e9 tuples and is left out.
    struct combo {
        std::size_t metric, m, d;
    };
    std::vector<combo> combos;
    for (std::size_t mi = 0; mi < 3; ++mi) {
        for (std::size_t m = 1; m <= 3; ++m) {
            for (std::size_t d = 1; d <= 2; ++d) {
                if (!(mi == 1 && m == 3 && d == 2)) {
                    combos.push_back({mi, m, d});
                }
            }
        }
    }
    const double eps = 1.0;
    const double r = 1.0;
    std::size_t mismatches = 0;
    std::uint64_t keys = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const combo& c = combos[i % combos.size()];
        const metric& m = metrics[c.metric];
        candidate_request req;
        req.anchor = random_curve(rng, "a" + std::to_string(i), c.m, c.d, -3.0, 3.0);
        req.out_len = c.m;
        req.enum_radius = (1.0 + eps / 2.0) * r;
        req.grid = grid_spec::make(eps, r, c.d, c.m, m);
        req.measure = m;
        const auto got = m.is_dfd() ? enumerate_dfd(req) : enumerate_lp(req);
        const auto pool = vertex_pool(req.anchor, req.enum_radius, req.grid);
        const auto expected = oracle::brute_candidates(req.anchor, pool, req.grid.edge, c.m,
                                                       req.enum_radius, m, 20'000'000);
        const std::set<lattice_curve_key> got_set(got.keys.begin(), got.keys.end());
        mismatches += got_set != expected || got_set.size() != got.keys.size();
        keys += expected.size();
    }
    return {mismatches == 0, "50 anchors over " + std::to_string(combos.size()) +
                                 " (metric, m, d) combinations, " + std::to_string(keys) +
                                 " keys, " + std::to_string(mismatches) + " set mismatches"};
}

// Monotone lattice paths from (1,1) to (a,b) with unit steps in i, j or both.
std::uint64_t count_paths(std::size_t a, std::size_t b) {
    if (a == 1 || b == 1) {
        return 1;
    }
    return count_paths(a - 1, b) + count_paths(a, b - 1) + count_paths(a - 1, b - 1);
}

outcome criterion_4() {
    std::ostringstream os;
    bool ok = true;
    const std::map<std::size_t, std::uint64_t> all_expected{{2, 3}, {3, 13}};
    for (const auto& [m, want] : all_expected) {
        const auto n = enumerate_alignments(m, m, false).size();
        ok = ok && n == want && n == count_paths(m, m);
        os << "all(" << m << ")=" << n << " ";
    }
    const std::map<std::size_t, std::uint64_t> bound{{2, 2}, {3, 6}, {4, 20}, {5, 70}};
    for (const auto& [m, b] : bound) {
        const auto n = enumerate_alignments(m, m, true).size();
        ok = ok && n <= b;
        os << "non-redundant(" << m << ")=" << n << "<=" << b << " ";
    }
    std::string s = os.str();
    s.pop_back();
    return {ok, s};
}

outcome criterion_5() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> len(1, 4);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    const std::array<metric, 3> metrics{metric::dfd(), metric::dtw(), metric(2.0)};
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = dim(rng);
        const curve p = random_curve(rng, "p", len(rng), d, -5.0, 5.0);
        const curve q = random_curve(rng, "q", len(rng), d, -5.0, 5.0);
        const metric& m = metrics[i % 3];
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tau : enumerate_alignments(p.size(), q.size(), false)) {
            best = std::min(best, alignment_cost(tau, p, q, m));
        }
        worst = std::max(worst, std::abs(distance(p, q, m) - best));
    }
    std::ostringstream os;
    os << "500 pairs, max |DP - enumerated| = " << worst;
    return {worst <= 1e-9, os.str()};
}

double unit_ball_volume(std::size_t d, double radius) {
    const double h = static_cast<double>(d) / 2.0;
    return std::pow(M_PI, h) / std::tgamma(h + 1.0) * std::pow(radius, static_cast<double>(d));
}

outcome criterion_6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    std::uniform_real_distribution<double> rad(0.0, 3.0);
    std::size_t ball_fail = 0;
    double tightest = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
        const auto g = grid_spec::make(0.5, 1.0, d, 1, metric::dfd());
        for (int i = 0; i < 20; ++i) {
            std::vector<double> c(d);
            for (auto& x : c) {
                x = coord(rng);
            }
            const double radius = rad(rng);
            const auto n = grid_points_in_ball(c, radius, g).size();
            const double bound =
                unit_ball_volume(d, radius / g.edge + std::sqrt(static_cast<double>(d)));
            ball_fail += static_cast<double>(n) > bound;
            tightest = std::max(tightest, static_cast<double>(n) / bound);
        }
    }
    std::size_t snap_fail = 0;
    double worst_ratio = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
        const auto g = grid_spec::make(0.25 + 0.25 * (i % 4), 1.0, d, 1, metric::dfd());
        std::vector<double> x(d);
        for (auto& v : x) {
            v = coord(rng);
        }
        const auto y = physical(snap(x, g).coords, g);
        const double err = euclidean_distance(x, y);
        const double lim = g.edge * std::sqrt(static_cast<double>(d)) / 2.0;
        snap_fail += err > lim;
        worst_ratio = std::max(worst_ratio, err / lim);
    }
    std::ostringstream os;
    os << "60 balls, " << ball_fail << " above the volume bound (max count/bound " << tightest
       << "); 10000 snaps, " << snap_fail << " above edge*sqrt(d)/2 (max ratio " << worst_ratio
       << ")";
    return {ball_fail == 0 && snap_fail == 0, os.str()};
}

ball_solver exact_ball_solver() {
    return {[](curve_view v) {
                std::vector<point> pts;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    pts.emplace_back(std::vector<double>(v.vertex(i).begin(), v.vertex(i).end()));
                }
                const auto b = oracle::exact_meb_small_d(pts);
                return meb_result{b.center, b.radius};
            },
            1.0};
}

outcome criterion_8() {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<std::size_t> len(1, 12);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    const double eps_values[] = {1.0, 0.5, 0.25};
    const auto exact = exact_ball_solver();
    std::size_t feasible = 0;
    std::size_t too_far = 0;
    std::size_t length_mismatch = 0;
    std::size_t wrongly_infeasible = 0;
    for (int i = 0; i < 100; ++i) {
        const curve c = random_curve(rng, "c" + std::to_string(i), len(rng), dim(rng), 0.0, 6.0);
        const double r = 1.0;
        const double eps = eps_values[i % 3];
        const std::size_t opt = oracle::min_simplification_length(c, r);
        const std::size_t k = 1 + static_cast<std::size_t>(i) % c.size();
        const auto out = simplify_dfd(c, k, r, eps);
        if (out.feasible()) {
            ++feasible;
            too_far += distance(c, *out.simplified, metric::dfd()) > (1.0 + eps) * r;
        } else {
            wrongly_infeasible += opt <= k;
        }
        const auto greedy = simplify_dfd(c, c.size(), r, exact, false);
        length_mismatch += !greedy.feasible() || greedy.pieces != opt;
    }
    std::ostringstream os;
    os << "100 curves, " << feasible << " feasible, " << too_far << " beyond (1+eps)r, "
       << wrongly_infeasible << " infeasible despite a k-vertex curve within r, "
       << length_mismatch << " exact-ball greedy lengths differing from the minimum";
    return {too_far == 0 && length_mismatch == 0 && wrongly_infeasible == 0, os.str()};
}

std::string index_bytes(const curve_index& idx) {
    std::stringstream ss;
    idx.write(ss);
    return ss.str();
}

outcome criterion_9() {
    std::mt19937_64 rng(909);
    std::size_t disagreements = 0;
    std::size_t ops = 0;
    std::size_t roundtrip_fail = 0;
    for (auto mode : {dict_mode::near_neighbor, dict_mode::range_count}) {
        dict_header h;
        h.mode = mode;
        h.dim = 2;
        h.out_len = 3;
        h.edge = 0.25;
        dictionary hashed(h, backend_kind::hashed);
        dictionary tree(h, backend_kind::prefix_tree);
        std::uniform_int_distribution<lattice_coord> coord(-3, 3);
        std::uniform_int_distribution<int> op(0, 9);
        for (int i = 0; i < 10'000; ++i, ++ops) {
            std::vector<lattice_coord> cells(6);
            for (auto& x : cells) {
                x = coord(rng) / (i % 2 ? 1 : 3);
            }
            const lattice_curve_key key(2, std::move(cells));
            const int o = op(rng);
            if (o < 5) {
                if (mode == dict_mode::near_neighbor) {
                    const auto id = "c" + std::to_string(i % 97);
                    disagreements += hashed.insert_first_wins(key, id) != tree.insert_first_wins(key, id);
                } else {
                    disagreements += hashed.increment(key) != tree.increment(key);
                }
            } else if (o < 6) {
                disagreements += hashed.erase(key) != tree.erase(key);
            } else {
                disagreements += hashed.lookup(key) != tree.lookup(key);
            }
        }
        disagreements += hashed.entries() != tree.entries();
        for (const auto* d : {&hashed, &tree}) {
            std::stringstream out;
            d->write(out);
            for (auto backend : {backend_kind::hashed, backend_kind::prefix_tree}) {
                std::stringstream in(out.str());
                const auto back = dictionary::read(in, backend);
                std::stringstream again;
                back.write(again);
                roundtrip_fail += back.entries() != d->entries() || back.header() != d->header() ||
                                  again.str() != out.str();
            }
        }
    }
    // Whole-index persistence on a small random workload in both modes.
    workload_spec spec;
    spec.n = 8;
    spec.m = 3;
    spec.d = 2;
    spec.queries = 50;
    spec.seed = 99;
    const auto w = make_workload(spec);
    for (auto mode : {dict_mode::near_neighbor, dict_mode::range_count}) {
        for (auto backend : {backend_kind::hashed, backend_kind::prefix_tree}) {
            index_params p;
            p.mode = mode;
            p.backend = backend;
            p.all_lengths = true;
            const auto idx = curve_index::build(w.curves, p);
            const auto bytes = index_bytes(idx);
            const auto path = fs::temp_directory_path() / "annc_acceptance_roundtrip.annc";
            idx.save(path);
            for (auto load_backend : {backend_kind::hashed, backend_kind::prefix_tree}) {
                const auto back = curve_index::load(path, load_backend);
                bool same = index_bytes(back) == bytes && back.curves() == idx.curves();
                for (const auto& q : w.queries) {
                    if (mode == dict_mode::near_neighbor) {
                        same = same && back.query(q).id == idx.query(q).id;
                    } else {
                        same = same && back.count(q) == idx.count(q);
                    }
                }
                roundtrip_fail += !same;
            }
            fs::remove(path);
        }
    }
    std::ostringstream os;
    os << ops << " random dictionary operations, " << disagreements
       << " backend disagreements; " << roundtrip_fail << " failed save/load round trips";
    return {disagreements == 0 && roundtrip_fail == 0, os.str()};
}

struct process_result {
    int code = -1;
    std::string out;
};

process_result run_cli(const std::string& args) {
    const std::string cmd = std::string(ANNC_CLI_PATH) + " " + args + " 2>/dev/null";
    process_result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

outcome criterion_10() {
    const auto dir = fs::temp_directory_path() / "annc_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    workload_spec spec;
    spec.n = 20;
    spec.m = 3;
    spec.d = 2;
    spec.queries = 200;
    spec.seed = 10;
    const auto w = make_workload(spec);
    {
        std::ofstream in(dir / "curves.jsonl");
        for (const auto& c : w.curves) {
            write_curve_line(in, c);
        }
        std::ofstream q(dir / "queries.jsonl");
        for (const auto& c : w.queries) {
            write_curve_line(q, c);
        }
    }
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const auto index = (dir / ("run" + std::to_string(run) + ".annc")).string();
        const auto build = run_cli("build " + (dir / "curves.jsonl").string() +
                                   " --backend trie --out " + index);
        const auto query = run_cli("query " + index + " " + (dir / "queries.jsonl").string() +
                                   " --backend trie");
        if (build.code != 0 || query.code != 0) {
            fs::remove_all(dir);
            return {false, "CLI run failed (build exit " + std::to_string(build.code) +
                               ", query exit " + std::to_string(query.code) + ")"};
        }
        outputs.push_back(build.out + "\x1f" + slurp(index) + "\x1f" + query.out);
    }
    fs::remove_all(dir);
    const auto lines = std::count(outputs[0].begin(), outputs[0].end(), '\n');
    return {outputs[0] == outputs[1],
            std::string(outputs[0] == outputs[1] ? "identical" : "different") +
                " build reports, index files and query outputs across two runs (" +
                std::to_string(outputs[0].size()) + " bytes, " + std::to_string(lines) +
                " lines)"};
}

} // namespace

int main() {
    report(1, "completeness & soundness", criterion_1);
    report(2, "asymmetric suite", criterion_2);
    report(3, "candidate sets vs brute force", criterion_3);
    report(4, "alignment counts", criterion_4);
    report(5, "distance DP vs alignment enumeration", criterion_5);
    report(6, "grid bounds", criterion_6);
    report(7, "range counting sandwich", criterion_7);
    report(8, "simplification", criterion_8);
    report(9, "backend equivalence & persistence", criterion_9);
    report(10, "determinism", criterion_10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
