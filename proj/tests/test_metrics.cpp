#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <memap/metrics.hpp>
#include <memap/stats.hpp>

using namespace memap;

namespace {

    Elite elite_at(double x, double y, double fit)
    {
        return Elite{Eigen::VectorXd::Zero(2), Eigen::Vector2d(x, y), fit, fit};
    }

    Archive grid_archive() { return Archive(GridSpec(Eigen::Vector2d(0., 0.), Eigen::Vector2d(1., 1.), {10, 10})); }

    /// Two-sided exact p by enumerating every split of the pooled sample.
    double enumeration_p(const std::vector<double>& a, const std::vector<double>& b)
    {
        std::vector<double> pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        const std::size_t n = pooled.size();
        // midranks by counting, independent of sorting
        std::vector<double> rank(n);
        for (std::size_t i = 0; i < n; ++i) {
            double less = 0., equal = 0.;
            for (double v : pooled) {
                less += v < pooled[i];
                equal += v == pooled[i];
            }
            rank[i] = less + (equal + 1.) / 2.;
        }
        double observed = 0.;
        for (std::size_t i = 0; i < a.size(); ++i)
            observed += rank[i];
        const double centre = a.size() * (n + 1) / 2.;
        std::vector<bool> mask(n, false);
        std::fill(mask.begin(), mask.begin() + static_cast<long>(a.size()), true);
        long hits = 0, total = 0;
        do {
            double w = 0.;
            for (std::size_t i = 0; i < n; ++i)
                if (mask[i])
                    w += rank[i];
            hits += std::abs(w - centre) >= std::abs(observed - centre) - 1e-9;
            ++total;
        } while (std::prev_permutation(mask.begin(), mask.end()));
        return static_cast<double>(hits) / static_cast<double>(total);
    }

} // namespace

TEST(QdScore, Examples)
{
    Archive a = grid_archive();
    EXPECT_EQ(qd_score(a), 0.);
    a.add_attempt(elite_at(0.05, 0.05, 0.25));
    a.add_attempt(elite_at(0.55, 0.55, 0.75));
    EXPECT_DOUBLE_EQ(qd_score(a), 1.);
    Archive full = grid_archive();
    for (int i = 0; i < 7; ++i)
        full.add_attempt(elite_at(0.05 + 0.1 * i, 0.5, 1.));
    EXPECT_DOUBLE_EQ(qd_score(full), 7.);
}

TEST(Snapshot, Fields)
{
    Archive a = grid_archive();
    a.add_attempt(elite_at(0.05, 0.05, 0.25));
    a.add_attempt(elite_at(0.95, 0.05, 0.5));
    const auto r = snapshot(a, 3, 1900, {0, 0, 0, 12});
    EXPECT_EQ(r.generation, 3);
    EXPECT_EQ(r.evaluations, 1900);
    EXPECT_EQ(r.archive_size, 2);
    EXPECT_EQ(r.best_fitness_norm, 0.5);
    EXPECT_DOUBLE_EQ(r.qd_score, 0.75);
    EXPECT_LE(r.qd_score, static_cast<double>(r.archive_size));
    EXPECT_EQ(r.active_kind_counts, (std::array<int, 4>{0, 0, 0, 12}));
    EXPECT_EQ(snapshot(grid_archive(), 0, 100, {}).best_fitness_norm, 0.);
}

TEST(QdScore, MatchesSumOverDump)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0., 1.);
    Archive a = grid_archive();
    for (int i = 0; i < 5000; ++i)
        a.add_attempt(elite_at(u(rng), u(rng), u(rng)));
    double sum = 0.;
    for (const auto& en : a.entries())
        sum += en.elite.fitness_norm;
    EXPECT_NEAR(qd_score(a), sum, 1e-9);
}

TEST(Quantile, Type7)
{
    // R: quantile(c(1, 2, 3, 4), c(.25, .5, .75)) = 1.75 2.5 3.25
    const std::vector<double> v{4., 1., 3., 2.};
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile(v, 0.75), 3.25);
    EXPECT_DOUBLE_EQ(median({5.}), 5.);
    EXPECT_DOUBLE_EQ(median({1., 9., 5.}), 5.);
    EXPECT_THROW(quantile({}, 0.5), InsufficientData);
}

TEST(Aggregate, QuartilesPerGeneration)
{
    std::vector<std::vector<GenerationRecord>> runs;
    for (int r = 1; r <= 4; ++r) {
        GenerationRecord g0, g1;
        g0.generation = 0;
        g0.archive_size = r;
        g1.generation = 10;
        g1.archive_size = 10 * r;
        g1.qd_score = r;
        runs.push_back({g0, g1});
    }
    const auto rows = aggregate_quartiles(runs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].generation, 10);
    EXPECT_DOUBLE_EQ(rows[0].archive_size[1], 2.5);
    EXPECT_DOUBLE_EQ(rows[1].archive_size[0], 17.5);
    EXPECT_DOUBLE_EQ(rows[1].qd_score[2], 3.25);
    runs[2].pop_back();
    EXPECT_THROW(aggregate_quartiles(runs), InvalidArgument);
}

TEST(TriangularSmooth, WeightsAndEdges)
{
    const std::vector<double> flat(20, 3.);
    for (double v : triangular_smooth(flat, 5))
        EXPECT_DOUBLE_EQ(v, 3.);
    // width 3: weights 1,2,1 in the interior
    const std::vector<double> spike{0., 0., 4., 0., 0.};
    const auto s = triangular_smooth(spike, 3);
    EXPECT_DOUBLE_EQ(s[1], 1.);
    EXPECT_DOUBLE_EQ(s[2], 2.);
    EXPECT_DOUBLE_EQ(s[3], 1.);
    EXPECT_EQ(triangular_smooth(spike, 1), spike);
}

TEST(RankSum, ExtremeSeparationMatchesEnumeration)
{
    const std::vector<double> a{1., 2., 3.}, b{10., 11., 12.};
    const auto r = stats::rank_sum_compare(a, b);
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.statistic, 6.);
    EXPECT_NEAR(r.p_value, enumeration_p(a, b), 1e-9);
    EXPECT_NEAR(r.p_value, 0.1, 1e-12);
}

TEST(RankSum, IdenticalSamples)
{
    const std::vector<double> a{1., 2., 3., 4.};
    EXPECT_NEAR(stats::rank_sum_compare(a, a).p_value, 1., 0.01);
    std::vector<double> big(30);
    std::iota(big.begin(), big.end(), 0.);
    const auto r = stats::rank_sum_compare(big, big);
    EXPECT_FALSE(r.exact);
    EXPECT_NEAR(r.p_value, 1., 0.01);
}

TEST(RankSum, SymmetricUnderSwap)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0., 1.);
    for (int size : {3, 5, 8, 12}) {
        std::vector<double> a(size), b(size + 1);
        for (auto& v : a)
            v = std::round(n(rng) * 3.);
        for (auto& v : b)
            v = std::round(n(rng) * 3. + 1.);
        const auto ab = stats::rank_sum_compare(a, b);
        const auto ba = stats::rank_sum_compare(b, a);
        const double total = (2. * size + 1.) * (2. * size + 2.) / 2.;
        EXPECT_NEAR(ab.statistic + ba.statistic, total, 1e-9);
        EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    }
}

TEST(RankSum, ExactWithTiesMatchesEnumeration)
{
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> d(0, 5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(3 + trial % 6), b(3 + (trial / 6) % 6);
        for (auto& v : a)
            v = d(rng);
        for (auto& v : b)
            v = d(rng);
        const auto r = stats::rank_sum_compare(a, b);
        ASSERT_TRUE(r.exact);
        ASSERT_NEAR(r.p_value, enumeration_p(a, b), 1e-9);
    }
}

TEST(RankSum, NormalApproximationCloseToEnumeration)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0., 1.);
    for (double shift : {0., 0.5, 1.}) {
        std::vector<double> a(10), b(10);
        for (auto& v : a)
            v = n(rng);
        for (auto& v : b)
            v = n(rng) + shift;
        const auto r = stats::rank_sum_compare(a, b);
        EXPECT_FALSE(r.exact);
        EXPECT_NEAR(r.p_value, enumeration_p(a, b), 0.01);
    }
}

TEST(RankSum, InsufficientData)
{
    EXPECT_THROW(stats::rank_sum_compare({1., 2.}, {1., 2., 3.}), InsufficientData);
}

TEST(Holm, StepDown)
{
    auto r = stats::holm({0.01, 0.04}, 0.05);
    EXPECT_EQ(r.rejected, (std::vector<bool>{true, true}));
    EXPECT_DOUBLE_EQ(r.thresholds[0], 0.025);
    EXPECT_DOUBLE_EQ(r.thresholds[1], 0.05);
    EXPECT_DOUBLE_EQ(r.adjusted[0], 0.02);
    EXPECT_DOUBLE_EQ(r.adjusted[1], 0.04);

    // stops at the first non-rejection
    r = stats::holm({0.03, 0.001, 0.04}, 0.05);
    EXPECT_EQ(r.rejected, (std::vector<bool>{false, true, false}));
    EXPECT_DOUBLE_EQ(r.adjusted[0], 0.06);
    EXPECT_DOUBLE_EQ(r.adjusted[2], 0.06);
}
