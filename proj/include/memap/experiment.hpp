#ifndef MEMAP_EXPERIMENT_HPP
#define MEMAP_EXPERIMENT_HPP

#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <memap/config.hpp>
#include <memap/engine.hpp>
#include <memap/io.hpp>
#include <memap/metrics.hpp>
#include <memap/stats.hpp>

namespace memap {

    namespace fs = std::filesystem;

    inline fs::path task_dir(const ExperimentConfig& cfg) { return fs::path(cfg.out) / std::string(to_string(cfg.task)); }

    inline fs::path replication_dir(const ExperimentConfig& cfg, Variant v, int rep)
    {
        return task_dir(cfg) / std::string(to_string(v)) / ("rep" + std::to_string(rep));
    }

    inline constexpr std::string_view summary_header = "variant,replication,seed,generations,evaluations,archive_size,best_fitness,qd_score";

    /// Median (across replications) of the per-generation emitter-kind
    /// proportions, each replication smoothed with a triangular window.
    inline std::string emitter_mix_csv(const std::vector<RunResult>& runs, int slots, int width)
    {
        std::ostringstream os;
        os << "generation,opt_share,dir_share,imp_share,rand_share\n";
        if (runs.empty())
            return os.str();
        const std::size_t len = runs.front().emitter_mix.size();
        std::vector<std::array<std::vector<double>, num_kinds>> smoothed;
        for (const auto& r : runs) {
            std::array<std::vector<double>, num_kinds> per_kind;
            for (int k = 0; k < num_kinds; ++k) {
                std::vector<double> s(len);
                for (std::size_t g = 0; g < len; ++g)
                    s[g] = static_cast<double>(r.emitter_mix[g][k]) / slots;
                per_kind[k] = triangular_smooth(s, width);
            }
            smoothed.push_back(std::move(per_kind));
        }
        for (std::size_t g = 0; g < len; ++g) {
            os << g + 1;
            for (int k = 0; k < num_kinds; ++k) {
                std::vector<double> vals;
                for (const auto& s : smoothed)
                    vals.push_back(s[k][g]);
                os << ',' << io::format_double(median(vals));
            }
            os << '\n';
        }
        return os.str();
    }

    /// Runs every (variant, replication) pair and writes
    ///   <out>/<task>/<variant>/rep<k>/{metrics,archive}.csv
    ///   <out>/<task>/<variant>/aggregate.csv
    ///   <out>/<task>/summary.csv
    /// Returns 0 on success, nonzero on failure.
    inline int run_experiment(const ExperimentConfig& cfg, std::ostream& log)
    {
        try {
            std::ostringstream summary;
            summary << summary_header << '\n';
            for (Variant v : cfg.variants) {
                std::vector<std::vector<GenerationRecord>> series;
                std::vector<RunResult> runs;
                for (int rep = 0; rep < cfg.replications; ++rep) {
                    const RunConfig rc = cfg.run_config(v, rep);
                    RunResult res = run(rc);
                    const fs::path dir = replication_dir(cfg, v, rep);
                    io::write_file(dir / "metrics.csv", io::metrics_csv(res.records));
                    io::write_file(dir / "archive.csv", io::archive_csv(res.archive));
                    const auto& last = res.records.back();
                    summary << to_string(v) << ',' << rep << ',' << rc.seed << ',' << last.generation << ',' << last.evaluations << ','
                            << last.archive_size << ',' << io::format_double(last.best_fitness_norm) << ',' << io::format_double(last.qd_score)
                            << '\n';
                    log << to_string(cfg.task) << ' ' << to_string(v) << " rep " << rep << ": size " << last.archive_size << ", qd " << last.qd_score
                        << ", best " << last.best_fitness_norm << " (" << res.wall_time_s << " s)\n";
                    series.push_back(std::move(res.records));
                    if (cfg.mix_smoothing > 0) {
                        res.archive = Archive();
                        runs.push_back(std::move(res));
                    }
                }
                const fs::path vdir = task_dir(cfg) / std::string(to_string(v));
                io::write_file(vdir / "aggregate.csv", io::aggregate_csv(aggregate_quartiles(series)));
                if (cfg.mix_smoothing > 0)
                    io::write_file(vdir / "emitter_mix.csv", emitter_mix_csv(runs, cfg.slots, cfg.mix_smoothing));
            }
            io::write_file(task_dir(cfg) / "summary.csv", summary.str());
        }
        catch (const std::exception& e) {
            log << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }

    /// Final-metric samples per variant, read from one or more summary files.
    inline std::map<std::string, std::vector<double>> read_summaries(const std::vector<fs::path>& files, const std::string& metric = "qd_score")
    {
        std::map<std::string, std::vector<double>> by_variant;
        for (const auto& f : files) {
            const io::Table t = io::read_table(f);
            const int vcol = t.column("variant");
            const int mcol = t.column(metric);
            for (const auto& row : t.rows)
                by_variant[row[vcol]].push_back(io::parse_double(row[mcol]));
        }
        return by_variant;
    }

    struct Comparison {
        std::string variant_a, variant_b;
        double median_a = 0., median_b = 0.;
        stats::RankSumResult test;
        double holm_adjusted = 1.;
        double holm_threshold = 0.;
        bool rejected = false;
    };

    /// Pairwise rank-sum tests over all variant pairs, Holm-corrected as one
    /// family.
    inline std::vector<Comparison> compare_variants(const std::map<std::string, std::vector<double>>& samples, double alpha = 0.05)
    {
        std::vector<Comparison> out;
        for (auto a = samples.begin(); a != samples.end(); ++a)
            for (auto b = std::next(a); b != samples.end(); ++b) {
                Comparison c;
                c.variant_a = a->first;
                c.variant_b = b->first;
                c.median_a = median(a->second);
                c.median_b = median(b->second);
                c.test = stats::rank_sum_compare(a->second, b->second);
                out.push_back(std::move(c));
            }
        std::vector<double> p;
        for (const auto& c : out)
            p.push_back(c.test.p_value);
        const auto h = stats::holm(p, alpha);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].holm_adjusted = h.adjusted[i];
            out[i].holm_threshold = h.thresholds[i];
            out[i].rejected = h.rejected[i];
        }
        return out;
    }

    inline std::string comparisons_csv(const std::vector<Comparison>& cs)
    {
        std::ostringstream os;
        os << "variant_a,variant_b,median_a,median_b,rank_sum,p_value,exact,holm_threshold,holm_adjusted_p,significant\n";
        for (const auto& c : cs)
            os << c.variant_a << ',' << c.variant_b << ',' << io::format_double(c.median_a) << ',' << io::format_double(c.median_b) << ','
               << io::format_double(c.test.statistic) << ',' << io::format_double(c.test.p_value) << ',' << (c.test.exact ? 1 : 0) << ','
               << io::format_double(c.holm_threshold) << ',' << io::format_double(c.holm_adjusted) << ',' << (c.rejected ? 1 : 0) << '\n';
        return os.str();
    }

    /// Task constants, including the derived normalisation values.
    inline std::string describe_task(const TaskSpec& t)
    {
        std::ostringstream os;
        auto vec = [](const Eigen::VectorXd& v) {
            std::string s;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + io::format_double(v[i]);
            return s;
        };
        os << "task = " << to_string(t.name) << '\n';
        os << "dim = " << t.dim << '\n';
        os << "genotype_lower = " << io::format_double(t.lower[0]) << '\n';
        os << "genotype_upper = " << io::format_double(t.upper[0]) << '\n';
        os << "bd_dim = " << t.bd_dim << '\n';
        os << "bd_lower = " << vec(t.bd_lower) << '\n';
        os << "bd_upper = " << vec(t.bd_upper) << '\n';
        os << "resolution = " << t.grid_resolution[0] << 'x' << t.grid_resolution[1] << '\n';
        os << "sigma0 = " << io::format_double(t.sigma0) << '\n';
        os << "fitness_worst_raw = " << io::format_double(t.fitness_worst_raw) << '\n';
        os << "fitness_best_raw = " << io::format_double(t.fitness_best_raw) << '\n';
        if (t.name == TaskName::RastriginProj || t.name == TaskName::RastriginMulti)
            os << "rastrigin_term_max = " << io::format_double(tasks::rastrigin_term_max()) << '\n';
        return os.str();
    }

} // namespace memap

#endif
