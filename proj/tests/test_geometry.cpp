#include "annc/errors.hpp"
#include "annc/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

using namespace annc;
using annc::testing::line;
using annc::testing::random_curve;

namespace {

alignment tau(std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    return alignment{std::move(pairs)};
}

double binomial(unsigned n, unsigned k) {
    double b = 1.0;
    for (unsigned i = 1; i <= k; ++i) {
        b = b * (n - k + i) / i;
    }
    return b;
}

} // namespace

TEST(Point, RejectsNonFiniteAndEmpty) {
    EXPECT_THROW(point({std::nan("")}), structural_error);
    EXPECT_THROW(point(std::vector<double>{}), structural_error);
    EXPECT_THROW(point({std::numeric_limits<double>::infinity()}), structural_error);
}

TEST(Curve, ShapeChecks) {
    EXPECT_THROW(curve("c", 2, {1.0, 2.0, 3.0}), structural_error);
    EXPECT_THROW(curve("c", 1, {}), structural_error);
    curve c("c", {point{0, 1}, point{2, 3}});
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.dim(), 2u);
    EXPECT_DOUBLE_EQ(c.vertex(1)[0], 2.0);
    EXPECT_THROW(curve("c", {point{0}, point{1, 2}}), dimension_error);
}

TEST(Metric, ParseAndName) {
    EXPECT_TRUE(metric::parse("dfd").is_dfd());
    EXPECT_TRUE(metric::parse("p=inf").is_dfd());
    EXPECT_EQ(metric::parse("dtw").p(), 1.0);
    EXPECT_EQ(metric::parse("p=2.5").p(), 2.5);
    EXPECT_EQ(metric::parse("p=2").name(), "p=2");
    EXPECT_EQ(metric::dfd().name(), "dfd");
    EXPECT_THROW(metric::parse("p=0.5"), config_error);
    EXPECT_THROW(metric::parse("euclid"), config_error);
    EXPECT_THROW(metric(0.9), config_error);
}

TEST(Alignment, Validity) {
    EXPECT_TRUE(is_valid_alignment(tau({{1, 1}, {2, 1}, {2, 2}}), 2, 2));
    EXPECT_FALSE(is_valid_alignment(tau({{1, 1}, {2, 2}}), 2, 3));
    EXPECT_FALSE(is_valid_alignment(tau({{1, 2}, {2, 2}}), 2, 2));
    EXPECT_FALSE(is_valid_alignment(tau({{1, 1}, {3, 2}}), 3, 2));
    EXPECT_FALSE(is_valid_alignment(tau({}), 1, 1));
}

TEST(AlignmentCost, Examples) {
    EXPECT_DOUBLE_EQ(alignment_cost(tau({{1, 1}}), line("p", {0}), line("q", {0}), metric::dfd()), 0.0);
    EXPECT_DOUBLE_EQ(
        alignment_cost(tau({{1, 1}, {2, 1}}), line("p", {0, 1}), line("q", {0}), metric::dtw()), 1.0);
    curve p("p", 2, {0, 0, 2, 0});
    curve q("q", 2, {0, 1, 2, 1});
    EXPECT_DOUBLE_EQ(alignment_cost(tau({{1, 1}, {2, 2}}), p, q, metric::dfd()), 1.0);
}

TEST(AlignmentCost, Errors) {
    EXPECT_THROW(alignment_cost(tau({{1, 1}}), line("p", {0, 1}), line("q", {0}), metric::dfd()),
                 structural_error);
    EXPECT_THROW(alignment_cost(tau({{1, 1}}), line("p", {0}), curve("q", 2, {0, 0}), metric::dfd()),
                 dimension_error);
}

TEST(Distance, Examples) {
    EXPECT_DOUBLE_EQ(distance(line("p", {0, 1}), line("q", {0, 1}), metric::dfd()), 0.0);
    EXPECT_DOUBLE_EQ(distance(curve("p", 2, {0, 0, 2, 0}), curve("q", 2, {0, 1, 2, 1}), metric::dfd()),
                     1.0);
    EXPECT_DOUBLE_EQ(distance(line("p", {0, 2, 4}), line("q", {0, 4}), metric::dtw()), 2.0);
}

TEST(Distance, DimensionMismatch) {
    EXPECT_THROW(distance(line("p", {0}), curve("q", 2, {0, 0}), metric::dfd()), dimension_error);
}

TEST(Distance, GeneralPIsRootOfSum) {
    // Only the diagonal alignment is non-redundant-optimal here: costs 3 and 4.
    curve p("p", 2, {0, 0, 10, 0});
    curve q("q", 2, {3, 0, 10, 4});
    EXPECT_NEAR(distance(p, q, metric(2.0)), 5.0, 1e-12);
    EXPECT_NEAR(distance(p, q, metric::dfd()), 4.0, 1e-12);
    EXPECT_NEAR(distance(p, q, metric::dtw()), 7.0, 1e-12);
}

TEST(Distance, LongCurvesUseHeapRow) {
    std::vector<double> xs(40);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = static_cast<double>(i);
    }
    curve a = line("a", xs);
    for (auto& x : xs) {
        x += 0.25;
    }
    EXPECT_NEAR(distance(a, line("b", xs), metric::dfd()), 0.25, 1e-12);
    EXPECT_NEAR(distance(a, line("b", xs), metric::dtw()), 10.0, 1e-12);
}

TEST(EnumerateAlignments, SmallCounts) {
    EXPECT_EQ(enumerate_alignments(1, 1, false).size(), 1u);
    EXPECT_EQ(enumerate_alignments(2, 2, false).size(), 3u);
    EXPECT_LE(enumerate_alignments(3, 3, true).size(), 6u);
    EXPECT_THROW(enumerate_alignments(12, 13, false), capacity_error);
    EXPECT_THROW(enumerate_alignments(0, 2, false), structural_error);
}

TEST(EnumerateAlignments, AllValidAndDistinct) {
    for (std::size_t m1 = 1; m1 <= 4; ++m1) {
        for (std::size_t m2 = 1; m2 <= 4; ++m2) {
            auto all = enumerate_alignments(m1, m2, false);
            std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
            for (const auto& a : all) {
                EXPECT_TRUE(is_valid_alignment(a, m1, m2));
                seen.insert(a.pairs);
            }
            EXPECT_EQ(seen.size(), all.size());
            for (const auto& a : enumerate_alignments(m1, m2, true)) {
                EXPECT_FALSE(has_redundant_pair(a));
                EXPECT_TRUE(seen.count(a.pairs));
            }
        }
    }
}

TEST(EnumerateAlignments, NonRedundantBound) {
    for (unsigned m = 2; m <= 6; ++m) {
        EXPECT_LE(static_cast<double>(enumerate_alignments(m, m, true).size()),
                  binomial(2 * m - 2, m - 1))
            << "m=" << m;
    }
}

TEST(Distance, MatchesEnumeratedMinimum) {
    std::mt19937_64 rng(11);
    const metric metrics[] = {metric::dfd(), metric::dtw(), metric(2.0), metric(3.0)};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m1 = 1 + trial % 4;
        const std::size_t m2 = 1 + (trial / 4) % 4;
        const std::size_t d = 1 + trial % 3;
        curve p = random_curve(rng, "p", m1, d);
        curve q = random_curve(rng, "q", m2, d);
        for (const auto& m : metrics) {
            double best = std::numeric_limits<double>::infinity();
            double best_nr = best;
            for (const auto& a : enumerate_alignments(m1, m2, false)) {
                const double c = alignment_cost(a, p, q, m);
                best = std::min(best, c);
                if (!has_redundant_pair(a)) {
                    best_nr = std::min(best_nr, c);
                }
            }
            EXPECT_NEAR(distance(p, q, m), best, 1e-9);
            EXPECT_NEAR(best_nr, best, 1e-9);
        }
    }
}

TEST(Distance, SymmetricAndMonotoneInP) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        curve p = random_curve(rng, "p", 1 + trial % 5, 2);
        curve q = random_curve(rng, "q", 1 + trial % 3, 2);
        EXPECT_NEAR(distance(p, q, metric::dtw()), distance(q, p, metric::dtw()), 1e-12);
        EXPECT_NEAR(distance(p, q, metric::dfd()), distance(q, p, metric::dfd()), 1e-12);
        EXPECT_LE(distance(p, q, metric::dfd()), distance(p, q, metric(2.0)) + 1e-12);
        EXPECT_LE(distance(p, q, metric(2.0)), distance(p, q, metric::dtw()) + 1e-12);
    }
}
