#ifndef MEMAP_TASKS_HPP
#define MEMAP_TASKS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <memap/archive.hpp>
#include <memap/error.hpp>

namespace memap {

    enum class TaskName {
        RastriginProj,
        RastriginMulti,
        Sphere,
        RedundantArm
    };

    inline constexpr std::array<TaskName, 4> all_tasks = {TaskName::RastriginProj, TaskName::RastriginMulti, TaskName::Sphere, TaskName::RedundantArm};

    inline std::string_view to_string(TaskName t)
    {
        switch (t) {
        case TaskName::RastriginProj: return "rastrigin-proj";
        case TaskName::RastriginMulti: return "rastrigin-multi";
        case TaskName::Sphere: return "sphere";
        case TaskName::RedundantArm: return "redundant-arm";
        }
        return "unknown";
    }

    inline std::optional<TaskName> parse_task_name(std::string_view s)
    {
        for (TaskName t : all_tasks)
            if (to_string(t) == s)
                return t;
        return std::nullopt;
    }

    namespace tasks {

        inline constexpr double rastrigin_shift = 0.4 * 5.12;
        inline constexpr double proj_range = 5.12;

        /// Rastrigin-proj descriptor projection: identity inside [-5.12, 5.12],
        /// 5.12 / x outside.
        inline double bd_proj_clip(double x)
        {
            if (x >= -proj_range && x <= proj_range)
                return x;
            return proj_range / x;
        }

        /// Shifted Rastrigin term (minimisation form) for one coordinate.
        inline double rastrigin_term(double x)
        {
            const double d = x - rastrigin_shift;
            return d * d - 10. * std::cos(2. * std::numbers::pi * d);
        }

        /// Maximum of rastrigin_term over [-5.12, 5.12]. The maximiser sits
        /// on the bump nearest the far corner; it is located by golden
        /// section search on each cosine period and compared to the corner.
        inline double rastrigin_term_max()
        {
            double best = std::max(rastrigin_term(-proj_range), rastrigin_term(proj_range));
            // with d = x - shift, each interval d in [k, k+1] holds one interior maximum
            for (int k = -16; k <= 16; ++k) {
                double a = rastrigin_shift + k;
                double b = rastrigin_shift + k + 1.;
                a = std::max(a, -proj_range);
                b = std::min(b, proj_range);
                if (a >= b)
                    continue;
                const double phi = (std::sqrt(5.) - 1.) / 2.;
                double lo = a, hi = b;
                for (int it = 0; it < 200; ++it) {
                    const double m1 = hi - phi * (hi - lo);
                    const double m2 = lo + phi * (hi - lo);
                    if (rastrigin_term(m1) < rastrigin_term(m2))
                        lo = m1;
                    else
                        hi = m2;
                }
                best = std::max({best, rastrigin_term(0.5 * (lo + hi)), rastrigin_term(a), rastrigin_term(b)});
            }
            return best;
        }

        inline Eigen::Vector2d arm_forward_kinematics(const Eigen::VectorXd& theta)
        {
            const double link = 1. / static_cast<double>(theta.size());
            double angle = 0.;
            Eigen::Vector2d pos = Eigen::Vector2d::Zero();
            for (Eigen::Index k = 0; k < theta.size(); ++k) {
                angle += theta[k];
                pos[0] += link * std::cos(angle);
                pos[1] += link * std::sin(angle);
            }
            return pos;
        }

        /// Population (divide-by-n) variance.
        inline double population_variance(const Eigen::VectorXd& x)
        {
            const double mean = x.mean();
            return (x.array() - mean).square().sum() / static_cast<double>(x.size());
        }

    } // namespace tasks

    struct Evaluation {
        double fitness_raw = 0.;
        double fitness_norm = 0.;
        Descriptor descriptor;
    };

    /// A benchmark problem: bounds, descriptor space, normalisation constants
    /// and CMA-ES initial step size. Fitness is maximised.
    struct TaskSpec {
        TaskName name = TaskName::Sphere;
        int dim = 100;
        Eigen::VectorXd lower;
        Eigen::VectorXd upper;
        int bd_dim = 2;
        Eigen::VectorXd bd_lower;
        Eigen::VectorXd bd_upper;
        std::vector<int> grid_resolution{100, 100};
        double sigma0 = 0.5;
        double fitness_worst_raw = 0.;
        double fitness_best_raw = 0.;

        GridSpec grid() const { return GridSpec(bd_lower, bd_upper, grid_resolution); }

        static TaskSpec make(TaskName name, int dim = 100, std::vector<int> resolution = {100, 100}, std::optional<double> sigma0 = std::nullopt)
        {
            const bool needs_two = name == TaskName::RastriginMulti;
            if (dim < 1 || (needs_two && dim < 2))
                throw InvalidConfig(std::string("task ") + std::string(to_string(name)) + ": dimension too small");
            if (name != TaskName::RastriginMulti && name != TaskName::RedundantArm && dim < 2)
                throw InvalidConfig("projected descriptor needs at least two dimensions");
            if (resolution.size() == 1)
                resolution.push_back(resolution.front());
            if (resolution.size() != 2)
                throw InvalidConfig("grid resolution must have two entries");

            TaskSpec t;
            t.name = name;
            t.dim = dim;
            t.grid_resolution = std::move(resolution);
            const double n = dim;
            const int half = dim / 2;
            switch (name) {
            case TaskName::RastriginProj:
            case TaskName::Sphere:
                t.lower = Eigen::VectorXd::Constant(dim, -51.2);
                t.upper = Eigen::VectorXd::Constant(dim, 51.2);
                t.bd_lower = Eigen::Vector2d(-tasks::proj_range * half, -tasks::proj_range * (dim - half));
                t.bd_upper = Eigen::Vector2d(tasks::proj_range * half, tasks::proj_range * (dim - half));
                t.sigma0 = 0.5;
                break;
            case TaskName::RastriginMulti:
                t.lower = Eigen::VectorXd::Constant(dim, -5.12);
                t.upper = Eigen::VectorXd::Constant(dim, 5.12);
                t.bd_lower = Eigen::Vector2d(-5.12, -5.12);
                t.bd_upper = Eigen::Vector2d(5.12, 5.12);
                t.sigma0 = 0.5;
                break;
            case TaskName::RedundantArm:
                t.lower = Eigen::VectorXd::Constant(dim, -std::numbers::pi);
                t.upper = Eigen::VectorXd::Constant(dim, std::numbers::pi);
                t.bd_lower = Eigen::Vector2d(-1., -1.);
                t.bd_upper = Eigen::Vector2d(1., 1.);
                t.sigma0 = 0.25;
                break;
            }
            if (sigma0) {
                if (!(*sigma0 > 0.))
                    throw InvalidConfig("sigma0 must be positive");
                t.sigma0 = *sigma0;
            }

            switch (name) {
            case TaskName::RastriginProj:
            case TaskName::RastriginMulti:
                t.fitness_best_raw = 10. * n;
                t.fitness_worst_raw = -n * tasks::rastrigin_term_max();
                break;
            case TaskName::Sphere: {
                const double far = tasks::proj_range + tasks::rastrigin_shift;
                t.fitness_best_raw = 0.;
                t.fitness_worst_raw = -n * far * far;
                break;
            }
            case TaskName::RedundantArm:
                t.fitness_best_raw = 0.;
                t.fitness_worst_raw = -std::numbers::pi * std::numbers::pi;
                break;
            }
            // validates bounds and resolution
            (void)t.grid();
            return t;
        }

        double normalise(double raw) const
        {
            const double v = (raw - fitness_worst_raw) / (fitness_best_raw - fitness_worst_raw);
            return std::clamp(v, 0., 1.);
        }

        bool in_bounds(const Eigen::VectorXd& x) const
        {
            return x.size() == dim && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
        }

        Eigen::VectorXd clip(const Eigen::VectorXd& x) const
        {
            if (x.size() != dim)
                throw InvalidArgument("genotype has wrong dimension");
            if (!x.allFinite())
                throw InvalidArgument("non-finite genotype component");
            return x.cwiseMax(lower).cwiseMin(upper);
        }

        /// Evaluates an in-bounds genotype.
        Evaluation evaluate(const Eigen::VectorXd& x) const
        {
            if (!in_bounds(x))
                throw InvalidArgument("evaluate: genotype outside task bounds; clip first");
            Evaluation ev;
            ev.descriptor.resize(2);
            switch (name) {
            case TaskName::RastriginProj:
            case TaskName::RastriginMulti: {
                double raw_min = 0.;
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    raw_min += tasks::rastrigin_term(x[i]);
                ev.fitness_raw = -raw_min;
                if (name == TaskName::RastriginProj)
                    ev.descriptor = _projected_bd(x);
                else
                    ev.descriptor << x[0], x[1];
                break;
            }
            case TaskName::Sphere:
                ev.fitness_raw = -(x.array() - tasks::rastrigin_shift).square().sum();
                ev.descriptor = _projected_bd(x);
                break;
            case TaskName::RedundantArm:
                ev.fitness_raw = -tasks::population_variance(x);
                ev.descriptor = tasks::arm_forward_kinematics(x);
                break;
            }
            ev.fitness_norm = normalise(ev.fitness_raw);
            return ev;
        }

    private:
        Eigen::VectorXd _projected_bd(const Eigen::VectorXd& x) const
        {
            const Eigen::Index half = x.size() / 2;
            double first = 0., second = 0.;
            for (Eigen::Index i = 0; i < half; ++i)
                first += tasks::bd_proj_clip(x[i]);
            for (Eigen::Index i = half; i < x.size(); ++i)
                second += tasks::bd_proj_clip(x[i]);
            return Eigen::Vector2d(first, second);
        }
    };

} // namespace memap

#endif
