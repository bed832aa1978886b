#ifndef MEMAP_ENGINE_HPP
#define MEMAP_ENGINE_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <memap/archive.hpp>
#include <memap/emitters.hpp>
#include <memap/error.hpp>
#include <memap/metrics.hpp>
#include <memap/parallel.hpp>
#include <memap/rng.hpp>
#include <memap/scheduler.hpp>
#include <memap/tasks.hpp>

namespace memap {

    enum class Variant {
        MeMapElitesUcb,
        MeMapElitesUniform,
        CmaMeOpt,
        CmaMeDir,
        CmaMeImp,
        MapElites
    };

    inline constexpr std::array<Variant, 6> all_variants = {Variant::MeMapElitesUcb, Variant::MeMapElitesUniform, Variant::CmaMeOpt,
                                                            Variant::CmaMeDir, Variant::CmaMeImp, Variant::MapElites};

    inline std::string_view to_string(Variant v)
    {
        switch (v) {
        case Variant::MeMapElitesUcb: return "me-map-elites-ucb";
        case Variant::MeMapElitesUniform: return "me-map-elites-uniform";
        case Variant::CmaMeOpt: return "cma-me-opt";
        case Variant::CmaMeDir: return "cma-me-dir";
        case Variant::CmaMeImp: return "cma-me-imp";
        case Variant::MapElites: return "map-elites";
        }
        return "unknown";
    }

    inline std::optional<Variant> parse_variant(std::string_view s)
    {
        for (Variant v : all_variants)
            if (to_string(v) == s)
                return v;
        return std::nullopt;
    }

    struct RunConfig {
        Variant variant = Variant::MeMapElitesUcb;
        long generations = 20000;
        int slots = 12;
        int batch_per_emitter = 50;
        int init_samples = 100;
        TaskSpec task = TaskSpec::make(TaskName::RastriginMulti);
        double zeta = 0.05;
        int window = 50;
        StatsGranularity granularity = StatsGranularity::Instance;
        /// Replaces the variant's pool composition while keeping its policy.
        std::optional<std::map<EmitterKind, int>> pool_override;
        LineOperatorParams line;
        cmaes::StopCriteria stop;
        std::uint64_t seed = 0;
        long metrics_every = 10;
        int threads = 1;

        void validate() const
        {
            if (generations < 1)
                throw InvalidConfig("generations must be at least 1");
            if (slots < 1)
                throw InvalidConfig("slots must be at least 1");
            if (batch_per_emitter < 2)
                throw InvalidConfig("batch per emitter must be at least 2");
            if (init_samples < 1)
                throw InvalidConfig("init samples must be at least 1");
            if (metrics_every < 1)
                throw InvalidConfig("metrics cadence must be at least 1");
            if (threads < 1)
                throw InvalidConfig("threads must be at least 1");
            if (!(line.sigma_iso >= 0.) || !(line.sigma_line >= 0.))
                throw InvalidConfig("line operator sigmas must be non-negative");
            if (variant == Variant::MeMapElitesUniform && !pool_override && slots % num_kinds != 0)
                throw InvalidConfig("uniform variant needs slots divisible by the number of emitter kinds");
            scheduler_config().validate();
        }

        /// Pool composition and selection policy implied by the variant.
        SchedulerConfig scheduler_config() const
        {
            SchedulerConfig sc;
            sc.slots = slots;
            sc.zeta = zeta;
            sc.window = window;
            sc.granularity = granularity;
            switch (variant) {
            case Variant::MeMapElitesUcb:
                sc.policy = SchedulerPolicy::Ucb;
                for (EmitterKind k : all_kinds)
                    sc.pool_composition[k] = slots;
                break;
            case Variant::MeMapElitesUniform:
                sc.policy = SchedulerPolicy::Fixed;
                for (EmitterKind k : all_kinds)
                    sc.pool_composition[k] = slots / num_kinds;
                break;
            case Variant::CmaMeOpt:
                sc.policy = SchedulerPolicy::Fixed;
                sc.pool_composition[EmitterKind::Optimising] = slots;
                break;
            case Variant::CmaMeDir:
                sc.policy = SchedulerPolicy::Fixed;
                sc.pool_composition[EmitterKind::RandomDirection] = slots;
                break;
            case Variant::CmaMeImp:
                sc.policy = SchedulerPolicy::Fixed;
                sc.pool_composition[EmitterKind::Improvement] = slots;
                break;
            case Variant::MapElites:
                sc.policy = SchedulerPolicy::Fixed;
                sc.pool_composition[EmitterKind::Random] = slots;
                break;
            }
            if (pool_override)
                sc.pool_composition = *pool_override;
            return sc;
        }

        long total_batch() const { return static_cast<long>(slots) * batch_per_emitter; }
    };

    /// Emitter kinds by id. Ids interleave the kinds (round-robin over the
    /// composition) so that the lowest ids cover every kind present.
    inline std::vector<EmitterKind> pool_layout(const std::map<EmitterKind, int>& composition)
    {
        std::vector<EmitterKind> kinds;
        int most = 0;
        for (const auto& [k, c] : composition)
            most = std::max(most, c);
        for (int i = 0; i < most; ++i)
            for (EmitterKind k : all_kinds) {
                auto it = composition.find(k);
                if (it != composition.end() && it->second > i)
                    kinds.push_back(k);
            }
        return kinds;
    }

    struct RunResult {
        Archive archive;
        std::vector<GenerationRecord> records;
        /// Active emitter count per kind, one entry per generation (index g-1).
        std::vector<std::array<int, num_kinds>> emitter_mix;
        long evaluations = 0;
        double wall_time_s = 0.;
    };

    /// Generates uniform random genotypes from the init substream and
    /// inserts them. Shared by all variants for a given seed.
    inline long initialize_archive(Archive& archive, const TaskSpec& task, int init_samples, std::uint64_t seed, int threads)
    {
        Rng rng = make_rng(seed, Stream::Init);
        std::vector<Genotype> genotypes;
        genotypes.reserve(init_samples);
        for (int s = 0; s < init_samples; ++s) {
            Genotype g(task.dim);
            for (int i = 0; i < task.dim; ++i)
                g[i] = std::uniform_real_distribution<double>(task.lower[i], task.upper[i])(rng);
            genotypes.push_back(std::move(g));
        }
        std::vector<Evaluation> evals(genotypes.size());
        parallel_for(genotypes.size(), threads, [&](std::size_t i) { evals[i] = task.evaluate(genotypes[i]); });
        for (std::size_t i = 0; i < genotypes.size(); ++i)
            archive.add_attempt(Elite{genotypes[i], evals[i].descriptor, evals[i].fitness_raw, evals[i].fitness_norm});
        return init_samples;
    }

    /// The multi-emitter MAP-Elites loop: emitter pool lifecycle, batch
    /// evaluation, sequential archive insertion and bandit bookkeeping.
    class Engine {
    public:
        explicit Engine(RunConfig cfg) : _cfg(std::move(cfg))
        {
            _cfg.validate();
            _archive = Archive(_cfg.task.grid());
            const SchedulerConfig sc = _cfg.scheduler_config();
            const auto kinds = pool_layout(sc.pool_composition);
            _scheduler = Scheduler(sc, kinds);
            EmitterSettings es;
            es.batch_size = _cfg.batch_per_emitter;
            es.line = _cfg.line;
            es.stop = _cfg.stop;
            for (std::size_t id = 0; id < kinds.size(); ++id)
                _emitters.emplace_back(static_cast<int>(id), kinds[id], es);
            _evaluations = initialize_archive(_archive, _cfg.task, _cfg.init_samples, _cfg.seed, _cfg.threads);
        }

        const RunConfig& config() const { return _cfg; }
        const Archive& archive() const { return _archive; }
        const Scheduler& scheduler() const { return _scheduler; }
        const std::vector<Emitter>& emitters() const { return _emitters; }
        long generation() const { return _generation; }
        long evaluations() const { return _evaluations; }
        const std::array<int, num_kinds>& active_kind_counts() const { return _kind_counts; }
        const std::vector<int>& terminated() const { return _terminated; }

        void step()
        {
            if (_archive.empty())
                throw EmptyArchive();
            const long gen = ++_generation;
            const auto gen_key = static_cast<std::uint64_t>(gen);

            // return terminated emitters to the pool, state reset
            for (int id : _terminated)
                _emitters[id].reset();
            _scheduler.release(_terminated);
            _terminated.clear();

            const auto selected = _scheduler.select_active(_scheduler.needed());
            for (int id : selected) {
                Rng rng = make_rng(_cfg.seed, Stream::Activate, static_cast<std::uint64_t>(id), gen_key);
                _emitters[id].activate(_archive, _cfg.task, rng);
            }
            _kind_counts = _scheduler.active_kind_counts();

            // active ids are ascending; this fixes the insertion order
            const std::vector<int> active = _scheduler.active();
            std::vector<std::vector<Candidate>> batches(active.size());
            for (std::size_t s = 0; s < active.size(); ++s) {
                Rng rng = make_rng(_cfg.seed, Stream::Sample, static_cast<std::uint64_t>(active[s]), gen_key);
                batches[s] = _emitters[active[s]].generate_samples(_archive, _cfg.task, rng);
            }

            std::vector<std::pair<std::size_t, std::size_t>> flat;
            for (std::size_t s = 0; s < batches.size(); ++s)
                for (std::size_t i = 0; i < batches[s].size(); ++i)
                    flat.emplace_back(s, i);
            std::vector<Evaluation> evals(flat.size());
            parallel_for(flat.size(), _cfg.threads, [&](std::size_t k) {
                evals[k] = _cfg.task.evaluate(batches[flat[k].first][flat[k].second].clipped);
            });

            std::vector<BanditStats::Counts> counts(_emitters.size());
            std::size_t k = 0;
            for (std::size_t s = 0; s < batches.size(); ++s) {
                Emitter& em = _emitters[active[s]];
                const auto& batch = batches[s];
                std::vector<double> rewards(batch.size());
                std::vector<AddResult> adds(batch.size());
                std::vector<double> raw_fitness(batch.size());
                for (std::size_t i = 0; i < batch.size(); ++i, ++k) {
                    const Evaluation& ev = evals[k];
                    adds[i] = _archive.add_attempt(Elite{batch[i].clipped, ev.descriptor, ev.fitness_raw, ev.fitness_norm});
                    rewards[i] = em.reward(ev, adds[i]);
                    raw_fitness[i] = ev.fitness_raw;
                    ++counts[active[s]].selections;
                    if (adds[i].added())
                        ++counts[active[s]].successes;
                }
                if (em.finish_generation(batch, rewards, adds, raw_fitness))
                    _terminated.push_back(active[s]);
            }
            _scheduler.record_generation(counts);
            _evaluations += static_cast<long>(flat.size());
        }

    private:
        RunConfig _cfg;
        Archive _archive;
        Scheduler _scheduler;
        std::vector<Emitter> _emitters;
        std::vector<int> _terminated;
        std::array<int, num_kinds> _kind_counts{};
        long _generation = 0;
        long _evaluations = 0;
    };

    /// Snapshots at generation 0 (post-initialisation), at every multiple of
    /// metrics_every, and at the final generation.
    inline RunResult run(const RunConfig& cfg)
    {
        const auto start = std::chrono::steady_clock::now();
        Engine engine(cfg);
        RunResult res;
        res.records.push_back(snapshot(engine.archive(), 0, engine.evaluations(), {}));
        res.emitter_mix.reserve(static_cast<std::size_t>(cfg.generations));
        for (long g = 1; g <= cfg.generations; ++g) {
            engine.step();
            res.emitter_mix.push_back(engine.active_kind_counts());
            if (g % cfg.metrics_every == 0 || g == cfg.generations)
                res.records.push_back(snapshot(engine.archive(), g, engine.evaluations(), engine.active_kind_counts()));
        }
        res.evaluations = engine.evaluations();
        res.archive = engine.archive();
        res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return res;
    }

} // namespace memap

#endif
