// annc: build, query and benchmark approximate near-neighbor indexes over curves.
//
// Exit codes:
//   0  success
//   1  internal error
//   2  usage error (bad flags, empty input)
//   3  input parse error (malformed curve file)
//   4  capacity guard exceeded or out of memory
//   5  index file format or corruption error
//   6  invalid configuration (parameters, mode, dimension, length)
//   7  bench found violations

#include "annc/curve_file.hpp"
#include "annc/errors.hpp"
#include "annc/index.hpp"
#include "annc/oracle.hpp"
#include "annc/simplify.hpp"
#include "annc/workload.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace annc;

enum exit_code : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_usage = 2,
    exit_parse = 3,
    exit_capacity = 4,
    exit_format = 5,
    exit_config = 6,
    exit_violations = 7,
};

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string num(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

struct run_config {
    std::string metric_name = "dfd";
    double epsilon = 1.0;
    double radius = 1.0;
    std::string mode = "nn";
    std::size_t k = 0;
    std::string backend = "hash";
    unsigned threads = 1;
    std::uint64_t max_candidates = default_max_candidates;
    std::vector<std::size_t> lengths;
    bool all_lengths = false;

    dict_mode parsed_mode() const {
        return mode == "count" ? dict_mode::range_count : dict_mode::near_neighbor;
    }
    backend_kind parsed_backend() const {
        return backend == "trie" ? backend_kind::prefix_tree : backend_kind::hashed;
    }

    index_params params() const {
        index_params p;
        p.epsilon = epsilon;
        p.r = radius;
        p.measure = metric::parse(metric_name);
        p.mode = parsed_mode();
        if (k != 0) {
            p.asymmetric_k = k;
        }
        p.query_lengths = lengths;
        p.all_lengths = all_lengths;
        p.backend = parsed_backend();
        p.max_candidates = max_candidates;
        p.threads = threads;
        return p;
    }
};

void add_index_flags(CLI::App& cmd, run_config& cfg) {
    cmd.add_option("--metric", cfg.metric_name, "dfd, dtw or p=<real>")->capture_default_str();
    cmd.add_option("--epsilon", cfg.epsilon, "approximation parameter in (0, 1]")
        ->capture_default_str();
    cmd.add_option("--radius", cfg.radius, "near-neighbor radius r > 0")->capture_default_str();
    cmd.add_option("--mode", cfg.mode, "nn or count")
        ->check(CLI::IsMember({"nn", "count"}))
        ->capture_default_str();
    cmd.add_option("--k", cfg.k, "asymmetric query length (dfd only)");
    cmd.add_option("--backend", cfg.backend, "hash or trie")
        ->check(CLI::IsMember({"hash", "trie"}))
        ->capture_default_str();
    cmd.add_option("--threads", cfg.threads, "build threads")->capture_default_str();
    cmd.add_option("--max-candidates", cfg.max_candidates, "per-curve candidate limit")
        ->capture_default_str();
}

std::vector<curve> load_input(const std::string& path) {
    auto curves = read_curves(std::filesystem::path(path));
    if (curves.empty()) {
        throw usage_error("input file '" + path + "' holds no curves");
    }
    return curves;
}

int cmd_build(const std::string& input, const std::string& out, const run_config& cfg) {
    const auto curves = load_input(input);
    const auto t0 = std::chrono::steady_clock::now();
    auto idx = curve_index::build(curves, cfg.params());
    const auto t1 = std::chrono::steady_clock::now();
    idx.save(out);

    const auto& p = idx.params();
    std::cout << "metric: " << p.measure.name() << "\n"
              << "epsilon: " << num(p.epsilon) << "\n"
              << "radius: " << num(p.r) << "\n"
              << "curves: " << curves.size() << "\n";
    for (const auto& [id, sizes] : idx.stats().per_curve) {
        std::cout << "candidates " << id;
        for (const auto& [l, n] : sizes) {
            std::cout << " L" << l << "=" << n;
        }
        std::cout << "\n";
    }
    for (const auto& id : idx.stats().skipped) {
        std::cout << "skipped " << id << " (no simplification within r)\n";
    }
    for (auto l : idx.query_lengths()) {
        std::cout << "dictionary L" << l << ": " << idx.dict(l).size() << "\n";
    }
    std::cout << "dictionary size: " << idx.dictionary_size() << "\n";
    // Wall time goes to stderr so stdout stays reproducible.
    std::cerr << "build time: " << std::chrono::duration<double>(t1 - t0).count() << " s\n";
    return exit_ok;
}

curve_index open_index(const std::string& path, const run_config& cfg, const CLI::App& cmd) {
    auto idx = curve_index::load(path, cfg.parsed_backend());
    const auto& p = idx.params();
    const bool given = cmd.count("--metric") + cmd.count("--epsilon") + cmd.count("--radius") > 0;
    if (given) {
        idx.require_params(cmd.count("--epsilon") ? cfg.epsilon : p.epsilon,
                           cmd.count("--radius") ? cfg.radius : p.r,
                           cmd.count("--metric") ? metric::parse(cfg.metric_name) : p.measure,
                           p.mode);
    }
    return idx;
}

// Runs `answer` on every record; bad records are reported and skipped.
int stream_queries(const std::string& path,
                   const std::function<std::string(const curve&)>& answer) {
    std::ifstream is(path);
    if (!is) {
        throw format_error("cannot open '" + path + "'");
    }
    int failures = 0;
    for_each_curve_line(is, [&](std::size_t line, const std::string& text) {
        try {
            const auto q = parse_curve_line(text, line);
            const auto result = answer(q);
            std::cout << q.id() << "\t" << result << "\n";
        } catch (const parse_error& e) {
            std::cerr << "skipped: " << e.what() << "\n";
            ++failures;
        } catch (const dimension_error& e) {
            std::cerr << "skipped line " << line << ": " << e.what() << "\n";
            ++failures;
        } catch (const lookup_error& e) {
            std::cerr << "skipped line " << line << ": " << e.what() << "\n";
            ++failures;
        }
    });
    return failures;
}

int cmd_query(const std::string& index_path, const std::string& queries, const run_config& cfg,
              const CLI::App& cmd) {
    const auto idx = open_index(index_path, cfg, cmd);
    if (idx.params().mode != dict_mode::near_neighbor) {
        throw mode_error("index was built in counting mode; use 'count'");
    }
    stream_queries(queries, [&](const curve& q) {
        const auto res = idx.query(q);
        return (res.matched() ? *res.id : std::string("NO")) + "\t" + num(res.guarantee);
    });
    return exit_ok;
}

int cmd_count(const std::string& index_path, const std::string& queries, const run_config& cfg,
              const CLI::App& cmd) {
    const auto idx = open_index(index_path, cfg, cmd);
    if (idx.params().mode != dict_mode::range_count) {
        throw mode_error("index was built in near-neighbor mode; use 'query'");
    }
    stream_queries(queries, [&](const curve& q) { return std::to_string(idx.count(q)); });
    return exit_ok;
}

int cmd_simplify(const std::string& input, std::size_t k, double radius, double eps) {
    const auto curves = load_input(input);
    for (const auto& c : curves) {
        const auto out = simplify_dfd(c, k, radius, eps);
        if (out.feasible()) {
            write_curve_line(std::cout, *out.simplified);
        } else {
            std::cout << c.id() << "\tINFEASIBLE\n";
        }
    }
    return exit_ok;
}

struct bench_config {
    std::size_t n = 20;
    std::size_t m = 4;
    std::size_t d = 2;
    std::size_t queries = 200;
    std::uint64_t seed = 1;
    std::string workload = "random";
    std::string csv;
};

double percentile(std::vector<double> v, double q) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const auto at = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    return v[std::min(at, v.size() - 1)];
}

int cmd_bench(const run_config& cfg, const bench_config& b) {
    const auto params = cfg.params();
    workload_spec spec;
    spec.n = b.n;
    spec.m = b.m;
    spec.d = b.d;
    spec.queries = b.queries;
    spec.query_len = cfg.k;
    spec.r = cfg.radius;
    spec.measure = params.measure;
    spec.epsilon = cfg.epsilon;
    spec.seed = b.seed;
    const auto w = make_workload(spec);

    auto idx = curve_index::build(w.curves, params);
    const double outer = (1.0 + cfg.epsilon) * cfg.radius;
    std::size_t violations = 0;
    std::size_t false_pos = 0;
    std::vector<double> micros;
    for (const auto& q : w.queries) {
        if (params.mode == dict_mode::near_neighbor) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = idx.query(q);
            micros.push_back(
                std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                    .count());
            const auto truth = oracle::linear_scan_nn(w.curves, q, params.measure);
            if (truth.nearest_distance <= cfg.radius && !res.matched()) {
                ++violations;
            }
            if (res.matched()) {
                const auto& c = *std::find_if(w.curves.begin(), w.curves.end(),
                                              [&](const curve& x) { return x.id() == *res.id; });
                false_pos += distance(c, q, params.measure) > outer;
            }
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            const auto n = idx.count(q);
            micros.push_back(
                std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                    .count());
            violations += n < oracle::count_within(w.curves, q, params.measure, cfg.radius);
            false_pos += n > oracle::count_within(w.curves, q, params.measure, outer);
        }
    }
    const double p50 = percentile(micros, 0.5);
    const double p99 = percentile(micros, 0.99);

    std::cout << "workload: " << b.workload << " n=" << b.n << " m=" << b.m << " d=" << b.d
              << " queries=" << b.queries << " seed=" << b.seed << "\n"
              << "metric: " << params.measure.name() << " eps=" << num(cfg.epsilon)
              << " r=" << num(cfg.radius) << " mode=" << cfg.mode << "\n"
              << "dictionary size: " << idx.dictionary_size() << "\n"
              << "violations: " << violations << "\n"
              << "false positives: " << false_pos << "\n";
    if (params.mode == dict_mode::range_count) {
        std::cout << "sandwich violations: " << violations + false_pos << "\n";
    }
    std::cout << "p50_us: " << num(p50) << "\n"
              << "p99_us: " << num(p99) << "\n";

    if (!b.csv.empty()) {
        const bool fresh = !std::filesystem::exists(b.csv);
        std::ofstream os(b.csv, std::ios::app);
        if (!os) {
            throw format_error("cannot open '" + b.csv + "' for writing");
        }
        if (fresh) {
            os << "workload,metric,eps,r,n,m,d,violations,false_pos,p50_us,p99_us\n";
        }
        os << b.workload << "," << params.measure.name() << "," << num(cfg.epsilon) << ","
           << num(cfg.radius) << "," << b.n << "," << b.m << "," << b.d << "," << violations
           << "," << false_pos << "," << num(p50) << "," << num(p99) << "\n";
    }
    return violations + false_pos == 0 ? exit_ok : exit_violations;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate near-neighbor search for polygonal curves"};
    app.require_subcommand(1);

    run_config cfg;
    std::string input, out, index_path, queries;

    auto* build = app.add_subcommand("build", "build an index from a curve file");
    build->add_option("input", input, "curve file (one JSON record per line)")->required();
    build->add_option("--out", out, "index file to write")->required();
    add_index_flags(*build, cfg);
    build->add_option("--lengths", cfg.lengths, "supported query lengths")->delimiter(',');
    build->add_flag("--all-lengths", cfg.all_lengths, "support every length up to the longest input");

    auto* query = app.add_subcommand("query", "answer near-neighbor queries");
    query->add_option("index", index_path, "index file")->required();
    query->add_option("queries", queries, "curve file of queries")->required();
    add_index_flags(*query, cfg);

    auto* count = app.add_subcommand("count", "answer approximate range-counting queries");
    count->add_option("index", index_path, "index file")->required();
    count->add_option("queries", queries, "curve file of queries")->required();
    add_index_flags(*count, cfg);

    auto* simplify = app.add_subcommand("simplify", "simplify curves under the Frechet distance");
    simplify->add_option("input", input, "curve file")->required();
    simplify->add_option("--k", cfg.k, "target vertex count")->required();
    simplify->add_option("--radius", cfg.radius, "distance bound r")->capture_default_str();
    simplify->add_option("--epsilon", cfg.epsilon, "enclosing-ball accuracy")->capture_default_str();

    bench_config bench_cfg;
    auto* bench = app.add_subcommand("bench", "check an index against the brute-force oracle");
    add_index_flags(*bench, cfg);
    bench->add_option("--n", bench_cfg.n, "input curves")->capture_default_str();
    bench->add_option("--m", bench_cfg.m, "vertices per input curve")->capture_default_str();
    bench->add_option("--d", bench_cfg.d, "dimension")->capture_default_str();
    bench->add_option("--queries", bench_cfg.queries, "query count")->capture_default_str();
    bench->add_option("--seed", bench_cfg.seed, "random seed")->capture_default_str();
    bench->add_option("--workload", bench_cfg.workload, "workload label for the CSV")
        ->capture_default_str();
    bench->add_option("--out", bench_cfg.csv, "CSV file to append results to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*build) {
            return cmd_build(input, out, cfg);
        }
        if (*query) {
            return cmd_query(index_path, queries, cfg, *query);
        }
        if (*count) {
            return cmd_count(index_path, queries, cfg, *count);
        }
        if (*simplify) {
            return cmd_simplify(input, cfg.k, cfg.radius, cfg.epsilon);
        }
        return cmd_bench(cfg, bench_cfg);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return exit_capacity;
    } catch (const std::bad_alloc&) {
        std::cerr << "capacity error: out of memory; lower --max-candidates to fail fast\n";
        return exit_capacity;
    } catch (const format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return exit_format;
    } catch (const annc::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
