#ifndef MEMAP_STATS_HPP
#define MEMAP_STATS_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <memap/error.hpp>

namespace memap::stats {

    /// Midranks (1-based) of the values, ties receiving the average rank.
    inline std::vector<double> midranks(const std::vector<double>& values)
    {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<double> ranks(values.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
                ++j;
            const double r = 0.5 * static_cast<double>(i + j) + 1.;
            for (std::size_t k = i; k <= j; ++k)
                ranks[order[k]] = r;
            i = j + 1;
        }
        return ranks;
    }

    struct RankSumResult {
        /// Sum of the ranks of the first sample in the pooled ranking.
        double statistic = 0.;
        double p_value = 1.;
        bool exact = false;
    };

    inline constexpr std::size_t exact_limit = 8;

    /// Two-sided Wilcoxon rank-sum (Mann-Whitney) test. Uses the exact
    /// permutation distribution of the midranks when both groups have at most
    /// 8 observations, otherwise the tie-corrected normal approximation with
    /// continuity correction.
    inline RankSumResult rank_sum_compare(const std::vector<double>& a, const std::vector<double>& b)
    {
        if (a.size() < 3 || b.size() < 3)
            throw InsufficientData("rank-sum test needs at least 3 observations per group");
        const std::size_t na = a.size(), nb = b.size(), n = na + nb;
        std::vector<double> pooled(a);
        pooled.insert(pooled.end(), b.begin(), b.end());
        const auto ranks = midranks(pooled);

        RankSumResult res;
        res.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(na), 0.);
        const double expected = static_cast<double>(na) * static_cast<double>(n + 1) / 2.;
        const double observed_dev = std::abs(res.statistic - expected);
        constexpr double eps = 1e-9;

        if (na <= exact_limit && nb <= exact_limit) {
            res.exact = true;
            std::uint64_t hits = 0, total = 0;
            const std::uint32_t limit = 1u << n;
            for (std::uint32_t mask = 0; mask < limit; ++mask) {
                if (static_cast<std::size_t>(std::popcount(mask)) != na)
                    continue;
                double w = 0.;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (1u << i))
                        w += ranks[i];
                ++total;
                if (std::abs(w - expected) >= observed_dev - eps)
                    ++hits;
            }
            res.p_value = static_cast<double>(hits) / static_cast<double>(total);
            return res;
        }

        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        double tie_term = 0.;
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i])
                ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double dn = static_cast<double>(n);
        const double var = static_cast<double>(na) * static_cast<double>(nb) / 12. * ((dn + 1.) - tie_term / (dn * (dn - 1.)));
        if (var <= 0.) {
            res.p_value = 1.;
            return res;
        }
        const double z = std::max(0., observed_dev - 0.5) / std::sqrt(var);
        res.p_value = std::min(1., std::erfc(z / std::sqrt(2.)));
        return res;
    }

    struct HolmResult {
        std::vector<bool> rejected;
        /// Holm-adjusted p-values, in input order.
        std::vector<double> adjusted;
        /// Per-hypothesis threshold alpha / (m - rank), in input order.
        std::vector<double> thresholds;
    };

    /// Holm step-down procedure over a family of p-values.
    inline HolmResult holm(const std::vector<double>& p, double alpha = 0.05)
    {
        const std::size_t m = p.size();
        HolmResult res{std::vector<bool>(m, false), std::vector<double>(m, 1.), std::vector<double>(m, 0.)};
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
        bool still_rejecting = true;
        double running = 0.;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = order[k];
            const double factor = static_cast<double>(m - k);
            res.thresholds[i] = alpha / factor;
            still_rejecting = still_rejecting && p[i] <= res.thresholds[i];
            res.rejected[i] = still_rejecting;
            running = std::max(running, std::min(1., factor * p[i]));
            res.adjusted[i] = running;
        }
        return res;
    }

} // namespace memap::stats

#endif
