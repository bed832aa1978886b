#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <memap/memap.hpp>

namespace {

    int cmd_run(const std::optional<std::string>& config_file, const std::map<std::string, std::string>& flags)
    {
        std::map<std::string, std::string> fallbacks;
        if (const char* env = std::getenv("QD_THREADS"))
            fallbacks["threads"] = env;
        memap::ExperimentConfig cfg;
        try {
            std::optional<std::filesystem::path> path;
            if (config_file)
                path = *config_file;
            cfg = memap::parse_config(path, flags, fallbacks);
        }
        catch (const memap::ConfigError& e) {
            std::cerr << "config error (" << e.field() << "): " << e.what() << '\n';
            return 2;
        }
        return memap::run_experiment(cfg, std::cerr);
    }

    int cmd_compare(const std::vector<std::string>& files, const std::string& metric, double alpha)
    {
        try {
            std::vector<std::filesystem::path> paths(files.begin(), files.end());
            const auto samples = memap::read_summaries(paths, metric);
            std::cout << memap::comparisons_csv(memap::compare_variants(samples, alpha));
        }
        catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-emitter MAP-Elites benchmark runner"};
    app.require_subcommand(1);

    // run: every flag mirrors a config-file key; only flags actually given
    // override the file
    auto* run = app.add_subcommand("run", "run variants x replications on a task");
    std::optional<std::string> config_file;
    run->add_option("--config", config_file, "key-value config file");
    std::map<std::string, std::string> given;
    std::map<std::string, std::string> raw;
    for (const auto& k : memap::config::keys) {
        const std::string flag(k.flag);
        run->add_option("--" + flag, raw[flag], std::string(k.section) + "." + std::string(k.key));
    }

    auto* compare = app.add_subcommand("compare", "pairwise rank-sum tests with Holm correction over summary files");
    std::vector<std::string> summaries;
    std::string metric = "qd_score";
    double alpha = 0.05;
    compare->add_option("summaries", summaries, "summary.csv files")->required()->check(CLI::ExistingFile);
    compare->add_option("--metric", metric, "summary column to compare")->capture_default_str();
    compare->add_option("--alpha", alpha, "family-wise significance level")->capture_default_str();

    auto* dump = app.add_subcommand("dump-task", "print task constants");
    std::string task_name;
    int dim = 100;
    std::string resolution = "100x100";
    dump->add_option("--task", task_name, "task name")->required();
    dump->add_option("--dim", dim, "genotype dimension")->capture_default_str();
    dump->add_option("--resolution", resolution, "grid resolution")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        for (const auto& [flag, value] : raw)
            if (run->count("--" + flag) > 0)
                given[flag] = value;
        return cmd_run(config_file, given);
    }
    if (*compare)
        return cmd_compare(summaries, metric, alpha);
    if (*dump) {
        try {
            memap::ExperimentConfig cfg;
            memap::config::apply(cfg, "task", task_name);
            memap::config::apply(cfg, "resolution", resolution);
            std::cout << memap::describe_task(memap::TaskSpec::make(cfg.task, dim, cfg.resolution));
        }
        catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }
    return 0;
}
