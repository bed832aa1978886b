#ifndef MEMAP_METRICS_HPP
#define MEMAP_METRICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <memap/archive.hpp>
#include <memap/emitters.hpp>
#include <memap/error.hpp>

namespace memap {

    struct GenerationRecord {
        long generation = 0;
        long evaluations = 0;
        long archive_size = 0;
        double best_fitness_norm = 0.;
        double qd_score = 0.;
        std::array<int, num_kinds> active_kind_counts{};

        friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
    };

    /// Sum of normalised fitness over all elites.
    inline double qd_score(const Archive& a)
    {
        double total = 0.;
        for (const auto& en : a)
            total += en.elite.fitness_norm;
        return total;
    }

    inline GenerationRecord snapshot(const Archive& a, long generation, long evaluations, const std::array<int, num_kinds>& kind_counts)
    {
        GenerationRecord r;
        r.generation = generation;
        r.evaluations = evaluations;
        r.archive_size = static_cast<long>(a.size());
        r.best_fitness_norm = a.empty() ? 0. : a.best_fitness();
        r.qd_score = qd_score(a);
        r.active_kind_counts = kind_counts;
        return r;
    }

    /// Linear-interpolation quantile (R type 7) of an unsorted sample.
    inline double quantile(std::vector<double> values, double q)
    {
        if (values.empty())
            throw InsufficientData("quantile of empty sample");
        std::sort(values.begin(), values.end());
        const double h = (static_cast<double>(values.size()) - 1.) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    }

    inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

    struct QuartileRow {
        long generation = 0;
        std::array<double, 3> archive_size{};
        std::array<double, 3> best_fitness{};
        std::array<double, 3> qd_score{};
    };

    /// Per-record first quartile, median and third quartile across
    /// replications. All series must share the same generation grid.
    inline std::vector<QuartileRow> aggregate_quartiles(const std::vector<std::vector<GenerationRecord>>& runs)
    {
        if (runs.empty())
            throw InsufficientData("aggregate: no runs");
        const std::size_t len = runs.front().size();
        for (const auto& r : runs)
            if (r.size() != len)
                throw InvalidArgument("aggregate: series lengths differ");
        std::vector<QuartileRow> rows(len);
        auto quart = [](const std::vector<double>& v) {
            return std::array<double, 3>{quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
        };
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<double> size, best, qd;
            for (const auto& r : runs) {
                if (r[i].generation != runs.front()[i].generation)
                    throw InvalidArgument("aggregate: generation grids differ");
                size.push_back(static_cast<double>(r[i].archive_size));
                best.push_back(r[i].best_fitness_norm);
                qd.push_back(r[i].qd_score);
            }
            rows[i].generation = runs.front()[i].generation;
            rows[i].archive_size = quart(size);
            rows[i].best_fitness = quart(best);
            rows[i].qd_score = quart(qd);
        }
        return rows;
    }

    /// Triangular moving average of odd-or-even width, truncated at the ends.
    inline std::vector<double> triangular_smooth(const std::vector<double>& series, int width)
    {
        if (width <= 1 || series.empty())
            return series;
        const int half = width / 2;
        std::vector<double> out(series.size());
        const auto n = static_cast<long>(series.size());
        for (long i = 0; i < n; ++i) {
            double acc = 0., norm = 0.;
            for (long k = -half; k <= half; ++k) {
                const long j = i + k;
                if (j < 0 || j >= n)
                    continue;
                const double w = static_cast<double>(half + 1 - std::labs(k));
                acc += w * series[j];
                norm += w;
            }
            out[i] = acc / norm;
        }
        return out;
    }

} // namespace memap

#endif
