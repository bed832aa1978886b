#ifndef MEMAP_SCHEDULER_HPP
#define MEMAP_SCHEDULER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <memap/emitters.hpp>
#include <memap/error.hpp>

namespace memap {

    enum class SchedulerPolicy {
        Ucb,
        /// Every terminated emitter is re-activated; bandit scores are ignored.
        Fixed
    };

    enum class StatsGranularity {
        Instance,
        Kind
    };

    inline std::string_view to_string(StatsGranularity g) { return g == StatsGranularity::Kind ? "kind" : "instance"; }

    struct SchedulerConfig {
        int slots = 12;
        double zeta = 0.05;
        int window = 50;
        SchedulerPolicy policy = SchedulerPolicy::Ucb;
        StatsGranularity granularity = StatsGranularity::Instance;
        std::map<EmitterKind, int> pool_composition;

        int pool_size() const
        {
            int total = 0;
            for (const auto& [kind, count] : pool_composition)
                total += count;
            return total;
        }

        void validate() const
        {
            if (slots < 1)
                throw InvalidConfig("scheduler: slots must be at least 1");
            if (!(zeta >= 0.) || !std::isfinite(zeta))
                throw InvalidConfig("scheduler: zeta must be non-negative");
            if (window < 1)
                throw InvalidConfig("scheduler: window must be at least 1");
            for (const auto& [kind, count] : pool_composition)
                if (count < 0)
                    throw InvalidConfig("scheduler: negative pool count");
            if (pool_size() < slots)
                throw InvalidConfig("scheduler: pool smaller than the number of active slots");
        }
    };

    /// Sliding-window selection/success counts per emitter.
    class BanditStats {
    public:
        struct Counts {
            long selections = 0;
            long successes = 0;
        };

        BanditStats() = default;
        BanditStats(std::size_t num_emitters, int window) : _window(window), _ring(num_emitters, std::vector<Counts>(window)), _sums(num_emitters)
        {
            if (window < 1)
                throw InvalidConfig("bandit window must be at least 1");
        }

        std::size_t num_emitters() const { return _sums.size(); }
        int window() const { return _window; }
        long generations_recorded() const { return _recorded; }

        const Counts& windowed(std::size_t id) const { return _sums.at(id); }

        long total_selections() const
        {
            long t = 0;
            for (const auto& s : _sums)
                t += s.selections;
            return t;
        }

        /// Appends one generation; entries older than the window drop out.
        void record_generation(std::span<const Counts> per_emitter)
        {
            if (per_emitter.size() != _sums.size())
                throw InvalidArgument("record_generation: one entry per emitter required");
            for (const auto& c : per_emitter)
                if (c.selections < 0 || c.successes < 0 || c.successes > c.selections)
                    throw InvalidArgument("record_generation: successes must lie in [0, selections]");
            const std::size_t slot = static_cast<std::size_t>(_recorded % _window);
            for (std::size_t e = 0; e < _sums.size(); ++e) {
                Counts& old = _ring[e][slot];
                _sums[e].selections += per_emitter[e].selections - old.selections;
                _sums[e].successes += per_emitter[e].successes - old.successes;
                old = per_emitter[e];
            }
            ++_recorded;
        }

        /// Sums recomputed from the ring buffer; used to check the running sums.
        Counts recomputed(std::size_t id) const
        {
            Counts c;
            for (const auto& en : _ring.at(id)) {
                c.selections += en.selections;
                c.successes += en.successes;
            }
            return c;
        }

    private:
        int _window = 1;
        std::vector<std::vector<Counts>> _ring;
        std::vector<Counts> _sums;
        long _recorded = 0;
    };

    /// UCB1 score: R + zeta * sqrt(ln t / N), +inf for never-selected arms.
    inline double ucb_score(long selections, long successes, long total_selections, double zeta)
    {
        if (selections <= 0)
            return std::numeric_limits<double>::infinity();
        const double mean = static_cast<double>(successes) / static_cast<double>(selections);
        const double t = static_cast<double>(std::max(total_selections, selections));
        return mean + zeta * std::sqrt(std::log(t) / static_cast<double>(selections));
    }

    /// Emitter pool plus the active set, with the selection policy.
    class Scheduler {
    public:
        Scheduler() = default;

        Scheduler(SchedulerConfig cfg, std::vector<EmitterKind> kinds_by_id) : _cfg(std::move(cfg)), _kinds(std::move(kinds_by_id)), _stats(_kinds.size(), _cfg.window)
        {
            _cfg.validate();
            if (static_cast<int>(_kinds.size()) != _cfg.pool_size())
                throw InvalidConfig("scheduler: emitter list does not match pool composition");
            _pool.resize(_kinds.size());
            std::iota(_pool.begin(), _pool.end(), 0);
        }

        const SchedulerConfig& config() const { return _cfg; }
        const BanditStats& stats() const { return _stats; }
        const std::vector<int>& pool() const { return _pool; }
        const std::vector<int>& active() const { return _active; }
        EmitterKind kind_of(int id) const { return _kinds.at(id); }

        double score(int id) const
        {
            if (_cfg.granularity == StatsGranularity::Instance) {
                const auto& c = _stats.windowed(id);
                return ucb_score(c.selections, c.successes, _stats.total_selections(), _cfg.zeta);
            }
            BanditStats::Counts c;
            for (std::size_t e = 0; e < _kinds.size(); ++e)
                if (_kinds[e] == _kinds[id]) {
                    c.selections += _stats.windowed(e).selections;
                    c.successes += _stats.windowed(e).successes;
                }
            return ucb_score(c.selections, c.successes, _stats.total_selections(), _cfg.zeta);
        }

        /// Pool ids ordered for selection: descending score under UCB (ties by
        /// ascending id), ascending id under the fixed policy.
        std::vector<int> ranked_pool() const
        {
            std::vector<int> ranked = _pool;
            std::sort(ranked.begin(), ranked.end());
            if (_cfg.policy == SchedulerPolicy::Ucb) {
                std::vector<double> scores(_kinds.size(), 0.);
                for (int id : ranked)
                    scores[id] = score(id);
                std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) { return scores[a] > scores[b]; });
            }
            return ranked;
        }

        /// Moves the `needed` best-ranked pool emitters to the active set and
        /// returns them in rank order.
        std::vector<int> select_active(int needed)
        {
            if (needed < 0 || needed > static_cast<int>(_pool.size()))
                throw InvariantViolation("select_active: not enough emitters in the pool");
            if (needed == 0)
                return {};
            std::vector<int> ranked = ranked_pool();
            ranked.resize(needed);
            for (int id : ranked) {
                _pool.erase(std::find(_pool.begin(), _pool.end(), id));
                _active.push_back(id);
            }
            std::sort(_active.begin(), _active.end());
            return ranked;
        }

        int needed() const { return _cfg.slots - static_cast<int>(_active.size()); }

        /// Returns terminated emitters to the pool.
        void release(std::span<const int> ids)
        {
            for (int id : ids) {
                auto it = std::find(_active.begin(), _active.end(), id);
                if (it == _active.end())
                    throw InvariantViolation("release: emitter is not active");
                _active.erase(it);
                _pool.push_back(id);
            }
            std::sort(_pool.begin(), _pool.end());
        }

        void record_generation(std::span<const BanditStats::Counts> per_emitter) { _stats.record_generation(per_emitter); }

        std::array<int, num_kinds> active_kind_counts() const
        {
            std::array<int, num_kinds> counts{};
            for (int id : _active)
                ++counts[static_cast<int>(_kinds[id])];
            return counts;
        }

    private:
        SchedulerConfig _cfg;
        std::vector<EmitterKind> _kinds;
        BanditStats _stats;
        std::vector<int> _pool;
        std::vector<int> _active;
    };

} // namespace memap

#endif
