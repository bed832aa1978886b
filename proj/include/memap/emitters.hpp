#ifndef MEMAP_EMITTERS_HPP
#define MEMAP_EMITTERS_HPP

#include <Eigen/Core>

#include <array>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <memap/archive.hpp>
#include <memap/cmaes.hpp>
#include <memap/error.hpp>
#include <memap/rng.hpp>
#include <memap/tasks.hpp>

namespace memap {

    enum class EmitterKind {
        Optimising = 0,
        RandomDirection = 1,
        Improvement = 2,
        Random = 3
    };

    inline constexpr std::array<EmitterKind, 4> all_kinds = {EmitterKind::Optimising, EmitterKind::RandomDirection, EmitterKind::Improvement, EmitterKind::Random};
    inline constexpr int num_kinds = 4;

    inline std::string_view to_string(EmitterKind k)
    {
        switch (k) {
        case EmitterKind::Optimising: return "optimising";
        case EmitterKind::RandomDirection: return "random-direction";
        case EmitterKind::Improvement: return "improvement";
        case EmitterKind::Random: return "random";
        }
        return "unknown";
    }

    /// Directional variation ("line") operator parameters. The isotropic term
    /// is relative to the search range of each coordinate.
    struct LineOperatorParams {
        double sigma_iso = 0.01;
        double sigma_line = 0.1;
    };

    /// Directional variation: x1 + sigma_iso * range ⊙ N(0,I) + sigma_line * N(0,1) * (x2 - x1).
    inline Genotype directional_variation(const Genotype& x1, const Genotype& x2, const Eigen::VectorXd& range, const LineOperatorParams& p, Rng& rng)
    {
        std::normal_distribution<double> normal(0., 1.);
        Genotype child(x1.size());
        for (Eigen::Index i = 0; i < x1.size(); ++i)
            child[i] = x1[i] + p.sigma_iso * range[i] * normal(rng);
        const double line = normal(rng);
        child += p.sigma_line * line * (x2 - x1);
        return child;
    }

    struct EmitterSettings {
        int batch_size = 50;
        LineOperatorParams line;
        cmaes::StopCriteria stop;
    };

    /// One generated candidate: the clipped genotype that gets evaluated, and
    /// the raw sample the CMA-ES state is told about.
    struct Candidate {
        Genotype raw;
        Genotype clipped;
    };

    /// Emitter state. Instances are owned by the engine; they read the archive
    /// but never insert into it.
    class Emitter {
    public:
        Emitter(int id, EmitterKind kind, EmitterSettings settings = {}) : _id(id), _kind(kind), _settings(settings)
        {
            if (settings.batch_size < 1)
                throw InvalidConfig("emitter batch size must be positive");
        }

        int id() const { return _id; }
        EmitterKind kind() const { return _kind; }
        int batch_size() const { return _settings.batch_size; }
        bool uses_cmaes() const { return _kind != EmitterKind::Random; }
        bool active() const { return _active; }

        const std::optional<cmaes::State>& cmaes() const { return _cmaes; }
        const std::optional<Eigen::VectorXd>& direction() const { return _direction; }
        const std::optional<Descriptor>& anchor() const { return _anchor; }

        void activate(const Archive& archive, const TaskSpec& task, Rng& rng)
        {
            if (archive.empty())
                throw EmptyArchive();
            _active = true;
            if (_kind == EmitterKind::Random)
                return;
            const Elite& seed = archive.random_elite(rng);
            _cmaes.emplace(task.dim, _settings.batch_size, seed.genotype, task.sigma0, _settings.stop);
            if (_kind == EmitterKind::RandomDirection) {
                _anchor = seed.descriptor;
                std::normal_distribution<double> normal(0., 1.);
                Eigen::VectorXd dir(seed.descriptor.size());
                do {
                    for (Eigen::Index i = 0; i < dir.size(); ++i)
                        dir[i] = normal(rng);
                } while (dir.norm() == 0.);
                _direction = dir / dir.norm();
            }
        }

        /// Returns the emitter to its pre-activation state.
        void reset()
        {
            _active = false;
            _cmaes.reset();
            _direction.reset();
            _anchor.reset();
        }

        std::vector<Candidate> generate_samples(const Archive& archive, const TaskSpec& task, Rng& rng) const
        {
            if (archive.empty())
                throw EmptyArchive();
            std::vector<Candidate> out;
            out.reserve(_settings.batch_size);
            if (_kind == EmitterKind::Random) {
                const Eigen::VectorXd range = task.upper - task.lower;
                for (int i = 0; i < _settings.batch_size; ++i) {
                    const Genotype& x1 = archive.random_elite(rng).genotype;
                    const Genotype& x2 = archive.random_elite(rng).genotype;
                    Genotype child = directional_variation(x1, x2, range, _settings.line, rng);
                    Genotype clipped = task.clip(child);
                    out.push_back({std::move(child), std::move(clipped)});
                }
                return out;
            }
            if (!_cmaes)
                throw InvalidArgument("generate_samples: emitter not activated");
            for (auto& s : _cmaes->ask(rng)) {
                Genotype clipped = task.clip(s);
                out.push_back({std::move(s), std::move(clipped)});
            }
            return out;
        }

        /// Per-sample ranking value for the inner CMA-ES (larger is better).
        double reward(const Evaluation& ev, const AddResult& add) const
        {
            switch (_kind) {
            case EmitterKind::Optimising:
                return ev.fitness_norm;
            case EmitterKind::RandomDirection:
                return (ev.descriptor - *_anchor).dot(*_direction);
            case EmitterKind::Improvement:
                return improvement_reward(ev.fitness_norm, add);
            case EmitterKind::Random:
                return 0.;
            }
            return 0.;
        }

        /// Banded encoding: new cells in [2,3], replacements in (1,2], rejects in [0,1].
        static double improvement_reward(double fitness_norm, const AddResult& add)
        {
            switch (add.status) {
            case AddStatus::NewCell: return 2. + fitness_norm;
            case AddStatus::Replaced: return 1. + add.improvement;
            case AddStatus::Rejected: return fitness_norm;
            }
            return fitness_norm;
        }

        /// Updates internal state and reports whether the emitter terminated.
        /// `raw_fitness` orders samples whose rewards tie, which keeps the
        /// search informed where the normalised fitness is clamped to 0.
        bool finish_generation(std::span<const Candidate> samples, std::span<const double> rewards, std::span<const AddResult> adds,
                               std::span<const double> raw_fitness = {})
        {
            if (samples.size() != rewards.size() || samples.size() != adds.size())
                throw InvalidArgument("finish_generation: one reward and add result per sample required");
            if (!raw_fitness.empty() && raw_fitness.size() != samples.size())
                throw InvalidArgument("finish_generation: one raw fitness per sample required");
            if (_kind == EmitterKind::Random)
                return true;
            if (!_cmaes)
                throw InvalidArgument("finish_generation: emitter not activated");
            std::vector<Eigen::VectorXd> raw;
            raw.reserve(samples.size());
            for (const auto& c : samples)
                raw.push_back(c.raw);
            _cmaes->tell(raw, rewards, raw_fitness);
            bool any_added = false;
            for (const auto& a : adds)
                any_added = any_added || a.added();
            _last_stop = _cmaes->should_stop();
            return _last_stop.has_value() || !any_added;
        }

        const std::optional<cmaes::StopReason>& last_stop_reason() const { return _last_stop; }

    private:
        int _id;
        EmitterKind _kind;
        EmitterSettings _settings;
        bool _active = false;
        std::optional<cmaes::State> _cmaes;
        std::optional<Eigen::VectorXd> _direction;
        std::optional<Descriptor> _anchor;
        std::optional<cmaes::StopReason> _last_stop;
    };

} // namespace memap

#endif
