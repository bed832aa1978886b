#ifndef MEMAP_ARCHIVE_HPP
#define MEMAP_ARCHIVE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <memap/error.hpp>
#include <memap/rng.hpp>

namespace memap {

    using Genotype = Eigen::VectorXd;
    using Descriptor = Eigen::VectorXd;
    using CellIndex = std::int64_t;

    struct Elite {
        Genotype genotype;
        Descriptor descriptor;
        double fitness_raw = 0.;
        double fitness_norm = 0.;
    };

    /// Uniform grid over descriptor space.
    struct GridSpec {
        Eigen::VectorXd lower;
        Eigen::VectorXd upper;
        std::vector<int> resolution;

        GridSpec() = default;
        GridSpec(Eigen::VectorXd lo, Eigen::VectorXd up, std::vector<int> res)
            : lower(std::move(lo)), upper(std::move(up)), resolution(std::move(res))
        {
            validate();
        }

        int dims() const { return static_cast<int>(resolution.size()); }

        CellIndex total_cells() const
        {
            CellIndex total = 1;
            for (int r : resolution)
                total *= r;
            return total;
        }

        void validate() const
        {
            if (resolution.empty())
                throw InvalidConfig("grid needs at least one dimension");
            if (lower.size() != dims() || upper.size() != dims())
                throw InvalidConfig("grid bounds do not match resolution length");
            for (int k = 0; k < dims(); ++k) {
                if (resolution[k] <= 0)
                    throw InvalidConfig("grid resolution must be positive");
                if (!(lower[k] < upper[k]))
                    throw InvalidConfig("grid lower bound must be below upper bound");
            }
        }
    };

    /// Per-axis bin index; values below the lower bound clamp to 0, values at
    /// or above the upper bound clamp to resolution-1.
    inline std::vector<int> axis_indices(const Descriptor& d, const GridSpec& spec)
    {
        if (d.size() != spec.dims())
            throw InvalidDescriptor("descriptor dimension does not match grid");
        std::vector<int> idx(spec.dims());
        for (int k = 0; k < spec.dims(); ++k) {
            if (!std::isfinite(d[k]))
                throw InvalidDescriptor("non-finite descriptor component");
            const double width = (spec.upper[k] - spec.lower[k]) / spec.resolution[k];
            const double pos = std::floor((d[k] - spec.lower[k]) / width);
            if (pos < 0.)
                idx[k] = 0;
            else if (pos >= spec.resolution[k])
                idx[k] = spec.resolution[k] - 1;
            else
                idx[k] = static_cast<int>(pos);
        }
        return idx;
    }

    /// Row-major flattening of the per-axis indices (first axis slowest).
    inline CellIndex cell_index(const Descriptor& d, const GridSpec& spec)
    {
        const auto idx = axis_indices(d, spec);
        CellIndex flat = 0;
        for (int k = 0; k < spec.dims(); ++k)
            flat = flat * spec.resolution[k] + idx[k];
        return flat;
    }

    enum class AddStatus {
        NewCell,
        Replaced,
        Rejected
    };

    struct AddResult {
        AddStatus status = AddStatus::Rejected;
        double improvement = 0.;
        CellIndex cell = 0;

        bool added() const { return status != AddStatus::Rejected; }
    };

    /// MAP-Elites grid archive. Elites are kept in a vector sorted by cell
    /// index, so storage is proportional to occupancy, iteration is in
    /// ascending cell order and uniform selection is O(1).
    class Archive {
    public:
        struct Entry {
            CellIndex cell;
            Elite elite;
        };

        Archive() = default;
        explicit Archive(GridSpec spec) : _spec(std::move(spec)) { _spec.validate(); }

        const GridSpec& spec() const { return _spec; }
        std::size_t size() const { return _entries.size(); }
        bool empty() const { return _entries.empty(); }

        std::span<const Entry> entries() const { return _entries; }
        auto begin() const { return _entries.cbegin(); }
        auto end() const { return _entries.cend(); }

        const Elite* find(CellIndex cell) const
        {
            auto it = _lower_bound(cell);
            return (it != _entries.end() && it->cell == cell) ? &it->elite : nullptr;
        }

        /// Competition rule: strict improvement is needed to replace an
        /// incumbent. Equal normalised fitness (both clamped at 0, say) falls
        /// back to the raw value; such a replacement reports improvement 0.
        AddResult add_attempt(Elite e)
        {
            if (!(e.fitness_norm >= 0. && e.fitness_norm <= 1.))
                throw InvalidArgument("elite fitness_norm outside [0,1]");
            const CellIndex cell = cell_index(e.descriptor, _spec);
            auto it = _lower_bound(cell);
            if (it == _entries.end() || it->cell != cell) {
                const double gain = e.fitness_norm;
                _entries.insert(it, Entry{cell, std::move(e)});
                return {AddStatus::NewCell, gain, cell};
            }
            const Elite& inc = it->elite;
            if (e.fitness_norm > inc.fitness_norm || (e.fitness_norm == inc.fitness_norm && e.fitness_raw > inc.fitness_raw)) {
                const double gain = e.fitness_norm - it->elite.fitness_norm;
                it->elite = std::move(e);
                return {AddStatus::Replaced, gain, cell};
            }
            return {AddStatus::Rejected, 0., cell};
        }

        const Elite& random_elite(Rng& rng) const
        {
            if (_entries.empty())
                throw EmptyArchive();
            std::uniform_int_distribution<std::size_t> pick(0, _entries.size() - 1);
            return _entries[pick(rng)].elite;
        }

        double best_fitness() const
        {
            if (_entries.empty())
                throw EmptyArchive();
            double best = _entries.front().elite.fitness_norm;
            for (const auto& en : _entries)
                best = std::max(best, en.elite.fitness_norm);
            return best;
        }

        const Elite& best_elite() const
        {
            if (_entries.empty())
                throw EmptyArchive();
            auto it = std::max_element(_entries.begin(), _entries.end(), [](const Entry& a, const Entry& b) {
                return a.elite.fitness_norm < b.elite.fitness_norm;
            });
            return it->elite;
        }

        friend bool operator==(const Archive& a, const Archive& b)
        {
            if (a._entries.size() != b._entries.size())
                return false;
            for (std::size_t i = 0; i < a._entries.size(); ++i) {
                const auto& x = a._entries[i];
                const auto& y = b._entries[i];
                if (x.cell != y.cell || x.elite.fitness_raw != y.elite.fitness_raw || x.elite.fitness_norm != y.elite.fitness_norm
                    || !_same(x.elite.genotype, y.elite.genotype) || !_same(x.elite.descriptor, y.elite.descriptor))
                    return false;
            }
            return true;
        }

    private:
        static bool _same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; }

        std::vector<Entry>::iterator _lower_bound(CellIndex cell)
        {
            return std::lower_bound(_entries.begin(), _entries.end(), cell, [](const Entry& en, CellIndex c) { return en.cell < c; });
        }
        std::vector<Entry>::const_iterator _lower_bound(CellIndex cell) const
        {
            return std::lower_bound(_entries.cbegin(), _entries.cend(), cell, [](const Entry& en, CellIndex c) { return en.cell < c; });
        }

        GridSpec _spec;
        std::vector<Entry> _entries;
    };

} // namespace memap

#endif
