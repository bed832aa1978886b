#ifndef MEMAP_CMAES_HPP
#define MEMAP_CMAES_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <memap/error.hpp>
#include <memap/rng.hpp>

namespace memap::cmaes {

    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /// Strategy parameters, derived from the usual default formulas with a
    /// caller-supplied population size.
    struct Params {
        int dim = 0;
        int lambda = 0;
        int mu = 0;
        Vector weights;
        double mu_eff = 0.;
        double c_sigma = 0.;
        double d_sigma = 0.;
        double c_c = 0.;
        double c_1 = 0.;
        double c_mu = 0.;
        double chi_n = 0.;

        static Params defaults(int dim, int lambda)
        {
            if (dim < 1)
                throw InvalidConfig("cmaes: dimension must be positive");
            if (lambda < 2)
                throw InvalidConfig("cmaes: lambda must be at least 2");
            Params p;
            const double n = dim;
            p.dim = dim;
            p.lambda = lambda;
            p.mu = lambda / 2;
            p.weights.resize(p.mu);
            for (int i = 0; i < p.mu; ++i)
                p.weights[i] = std::log(p.mu + 0.5) - std::log(i + 1.);
            p.weights /= p.weights.sum();
            p.mu_eff = 1. / p.weights.squaredNorm();

            p.c_sigma = (p.mu_eff + 2.) / (n + p.mu_eff + 5.);
            p.d_sigma = 1. + 2. * std::max(0., std::sqrt((p.mu_eff - 1.) / (n + 1.)) - 1.) + p.c_sigma;
            p.c_c = (4. + p.mu_eff / n) / (n + 4. + 2. * p.mu_eff / n);
            p.c_1 = 2. / ((n + 1.3) * (n + 1.3) + p.mu_eff);
            p.c_mu = std::min(1. - p.c_1, 2. * (p.mu_eff - 2. + 1. / p.mu_eff) / ((n + 2.) * (n + 2.) + p.mu_eff));
            p.chi_n = std::sqrt(n) * (1. - 1. / (4. * n) + 1. / (21. * n * n));
            return p;
        }
    };

    enum class StopReason {
        ConditionCov,
        TolX,
        TolFun,
        NoEffectAxis,
        NoEffectCoord,
        NumericalError
    };

    inline std::string_view to_string(StopReason r)
    {
        switch (r) {
        case StopReason::ConditionCov: return "condition-cov";
        case StopReason::TolX: return "tolx";
        case StopReason::TolFun: return "tolfun";
        case StopReason::NoEffectAxis: return "no-effect-axis";
        case StopReason::NoEffectCoord: return "no-effect-coord";
        case StopReason::NumericalError: return "numerical-error";
        }
        return "unknown";
    }

    /// Which termination tests are enabled, and their thresholds.
    struct StopCriteria {
        bool condition_cov = true;
        bool tol_x = true;
        bool tol_fun = true;
        bool no_effect_axis = true;
        bool no_effect_coord = true;

        double max_condition = 1e14;
        double tol_x_factor = 1e-12;
        double tol_fun_threshold = 1e-12;
    };

    class State {
    public:
        State() = default;

        State(int dim, int lambda, const Vector& mean0, double sigma0, StopCriteria stop = {})
            : _params(Params::defaults(dim, lambda)), _stop(stop)
        {
            if (!(sigma0 > 0.) || !std::isfinite(sigma0))
                throw InvalidConfig("cmaes: sigma0 must be positive");
            if (mean0.size() != dim)
                throw InvalidConfig("cmaes: mean0 has wrong dimension");
            _mean = mean0;
            _sigma = sigma0;
            _sigma0 = sigma0;
            _C = Matrix::Identity(dim, dim);
            _B = Matrix::Identity(dim, dim);
            _D = Vector::Ones(dim);
            _BD = Matrix::Identity(dim, dim);
            _invsqrtC = Matrix::Identity(dim, dim);
            _p_sigma = Vector::Zero(dim);
            _p_c = Vector::Zero(dim);
            _history_len = 10 + static_cast<int>(std::ceil(30. * dim / lambda));
        }

        const Params& params() const { return _params; }
        const StopCriteria& stop_criteria() const { return _stop; }
        const Vector& mean() const { return _mean; }
        double sigma() const { return _sigma; }
        double sigma0() const { return _sigma0; }
        const Matrix& cov() const { return _C; }
        const Matrix& eigen_basis() const { return _B; }
        /// Square roots of the eigenvalues of C.
        const Vector& axis_lengths() const { return _D; }
        const Vector& p_sigma() const { return _p_sigma; }
        const Vector& p_c() const { return _p_c; }
        int generation() const { return _generation; }
        /// (reward, tie-break key) of the best sample, recent generations.
        const std::deque<std::pair<double, double>>& best_reward_history() const { return _best_history; }
        bool stopped() const { return should_stop().has_value(); }

        /// Draws lambda unclipped samples mean + sigma * B * D * z.
        std::vector<Vector> ask(Rng& rng) const
        {
            if (stopped())
                throw EmitterExhausted();
            std::normal_distribution<double> normal(0., 1.);
            std::vector<Vector> samples;
            samples.reserve(_params.lambda);
            Vector z(_params.dim);
            for (int k = 0; k < _params.lambda; ++k) {
                for (int i = 0; i < _params.dim; ++i)
                    z[i] = normal(rng);
                samples.emplace_back(_mean + _sigma * (_BD * z));
            }
            return samples;
        }

        /// Updates the distribution from samples ranked by reward (larger is
        /// better). Equal rewards are ordered by `tie_break` when given, then
        /// by sample order.
        void tell(std::span<const Vector> samples, std::span<const double> rewards, std::span<const double> tie_break = {})
        {
            const int n = _params.dim;
            const int lambda = _params.lambda;
            if (static_cast<int>(samples.size()) != lambda || static_cast<int>(rewards.size()) != lambda)
                throw InvalidArgument("cmaes::tell: expected lambda samples and rewards");
            for (double r : rewards)
                if (!std::isfinite(r))
                    throw InvalidArgument("cmaes::tell: non-finite reward");
            for (const auto& s : samples)
                if (s.size() != n)
                    throw InvalidArgument("cmaes::tell: sample has wrong dimension");
            if (!tie_break.empty() && static_cast<int>(tie_break.size()) != lambda)
                throw InvalidArgument("cmaes::tell: expected lambda tie-break keys");
            auto key = [&](int i) { return tie_break.empty() ? 0. : tie_break[i]; };

            std::vector<int> order(lambda);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                if (rewards[a] != rewards[b])
                    return rewards[a] > rewards[b];
                return key(a) > key(b);
            });

            const Vector old_mean = _mean;
            Matrix Y(n, _params.mu);
            Vector y_w = Vector::Zero(n);
            for (int i = 0; i < _params.mu; ++i) {
                Y.col(i) = (samples[order[i]] - old_mean) / _sigma;
                y_w += _params.weights[i] * Y.col(i);
            }
            _mean = old_mean + _sigma * y_w;

            const double cs = _params.c_sigma;
            _p_sigma = (1. - cs) * _p_sigma + std::sqrt(cs * (2. - cs) * _params.mu_eff) * (_invsqrtC * y_w);
            const double ps_norm = _p_sigma.norm();
            const double denom = std::sqrt(1. - std::pow(1. - cs, 2. * (_generation + 1)));
            const bool hsig = ps_norm / denom < (1.4 + 2. / (n + 1.)) * _params.chi_n;

            const double cc = _params.c_c;
            _p_c = (1. - cc) * _p_c;
            if (hsig)
                _p_c += std::sqrt(cc * (2. - cc) * _params.mu_eff) * y_w;

            const double c1 = _params.c_1;
            const double cmu = _params.c_mu;
            const double delta_h = hsig ? 0. : cc * (2. - cc);
            Matrix rank_mu = Y * _params.weights.asDiagonal() * Y.transpose();
            _C = (1. - c1 - cmu + c1 * delta_h) * _C + c1 * (_p_c * _p_c.transpose()) + cmu * rank_mu;
            _C = 0.5 * (_C + _C.transpose());

            _sigma *= std::exp((cs / _params.d_sigma) * (ps_norm / _params.chi_n - 1.));

            ++_generation;
            _best_history.push_back({rewards[order[0]], key(order[0])});
            while (static_cast<int>(_best_history.size()) > _history_len)
                _best_history.pop_front();

            _decompose();
        }

        std::optional<StopReason> should_stop() const
        {
            const int n = _params.dim;
            if (_numerical_error || !(_sigma > 0.) || !std::isfinite(_sigma))
                return StopReason::NumericalError;

            if (_stop.condition_cov) {
                const double dmax = _D.maxCoeff();
                const double dmin = _D.minCoeff();
                if (dmin <= 0. || (dmax * dmax) / (dmin * dmin) > _stop.max_condition)
                    return StopReason::ConditionCov;
            }

            if (_stop.tol_x) {
                const double tol = _stop.tol_x_factor * _sigma0;
                bool all_small = true;
                for (int i = 0; i < n && all_small; ++i)
                    all_small = _sigma * std::max(std::abs(_p_c[i]), std::sqrt(_C(i, i))) < tol;
                if (all_small)
                    return StopReason::TolX;
            }

            // a flat reward with a moving tie-break key is still progress
            if (_stop.tol_fun && static_cast<int>(_best_history.size()) >= _history_len) {
                auto range = [&](auto proj) {
                    double lo = proj(_best_history.front()), hi = lo;
                    for (const auto& h : _best_history) {
                        lo = std::min(lo, proj(h));
                        hi = std::max(hi, proj(h));
                    }
                    return hi - lo;
                };
                if (range([](const auto& h) { return h.first; }) < _stop.tol_fun_threshold &&
                    range([](const auto& h) { return h.second; }) < _stop.tol_fun_threshold)
                    return StopReason::TolFun;
            }

            if (_stop.no_effect_axis && _generation > 0) {
                const int axis = _generation % n;
                const Vector shifted = _mean + 0.1 * _sigma * _D[axis] * _B.col(axis);
                if (shifted == _mean)
                    return StopReason::NoEffectAxis;
            }

            if (_stop.no_effect_coord) {
                for (int i = 0; i < n; ++i)
                    if (_mean[i] == _mean[i] + 0.2 * _sigma * std::sqrt(_C(i, i)))
                        return StopReason::NoEffectCoord;
            }
            return std::nullopt;
        }

        /// Overrides internal state; intended for tests and diagnostics.
        void set_sigma(double sigma) { _sigma = sigma; }
        void set_covariance(const Matrix& C)
        {
            _C = 0.5 * (C + C.transpose());
            _decompose();
        }

    private:
        void _decompose()
        {
            Eigen::SelfAdjointEigenSolver<Matrix> solver(_C);
            if (solver.info() != Eigen::Success || !(solver.eigenvalues().minCoeff() > 0.)) {
                _numerical_error = true;
                return;
            }
            _B = solver.eigenvectors();
            _D = solver.eigenvalues().cwiseSqrt();
            _BD = _B * _D.asDiagonal();
            _invsqrtC = _B * _D.cwiseInverse().asDiagonal() * _B.transpose();
        }

        Params _params;
        StopCriteria _stop;
        Vector _mean;
        double _sigma = 1.;
        double _sigma0 = 1.;
        Matrix _C, _B, _BD, _invsqrtC;
        Vector _D;
        Vector _p_sigma, _p_c;
        int _generation = 0;
        int _history_len = 0;
        std::deque<std::pair<double, double>> _best_history;
        bool _numerical_error = false;
    };

} // namespace memap::cmaes

#endif
