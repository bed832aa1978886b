#ifndef MEMAP_CONFIG_HPP
#define MEMAP_CONFIG_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <memap/engine.hpp>
#include <memap/error.hpp>
#include <memap/tasks.hpp>

namespace memap {

    /// Experiment description: task, variants, replications and output layout.
    /// Defaults reproduce the published hyper-parameters.
    struct ExperimentConfig {
        TaskName task = TaskName::RastriginMulti;
        int dim = 100;
        std::vector<int> resolution{100, 100};
        std::optional<double> sigma0;
        std::vector<Variant> variants{all_variants.begin(), all_variants.end()};
        int replications = 20;
        std::uint64_t base_seed = 0;
        long generations = 20000;
        int slots = 12;
        int batch = 50;
        int init_samples = 100;
        double zeta = 0.05;
        int window = 50;
        StatsGranularity granularity = StatsGranularity::Instance;
        long metrics_every = 10;
        int threads = 1;
        std::string out = "results";
        int mix_smoothing = 0;

        RunConfig run_config(Variant v, int replication) const
        {
            RunConfig rc;
            rc.variant = v;
            rc.generations = generations;
            rc.slots = slots;
            rc.batch_per_emitter = batch;
            rc.init_samples = init_samples;
            rc.task = TaskSpec::make(task, dim, resolution, sigma0);
            rc.zeta = zeta;
            rc.window = window;
            rc.granularity = granularity;
            rc.seed = base_seed + static_cast<std::uint64_t>(replication);
            rc.metrics_every = metrics_every;
            rc.threads = threads;
            return rc;
        }
    };

    namespace config {

        /// Config-file keys (section.key) and the command-line flag each mirrors.
        struct KeySpec {
            std::string_view section;
            std::string_view key;
            std::string_view flag;
        };

        inline constexpr std::array<KeySpec, 18> keys = {{
            {"task", "name", "task"},
            {"task", "dim", "dim"},
            {"task", "resolution", "resolution"},
            {"task", "sigma0", "sigma0"},
            {"run", "variant", "variant"},
            {"run", "generations", "generations"},
            {"run", "slots", "slots"},
            {"run", "batch", "batch"},
            {"run", "init-samples", "init-samples"},
            {"run", "replications", "replications"},
            {"run", "seed", "seed"},
            {"run", "metrics-every", "metrics-every"},
            {"run", "threads", "threads"},
            {"run", "out", "out"},
            {"run", "mix-smoothing", "mix-smoothing"},
            {"scheduler", "zeta", "zeta"},
            {"scheduler", "window", "window"},
            {"scheduler", "stats-granularity", "stats-granularity"},
        }};

        inline std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        inline std::optional<std::string_view> flag_for(std::string_view section, std::string_view key)
        {
            for (const auto& k : keys) {
                if (section.empty() && (k.flag == key || k.key == key))
                    return k.flag;
                if (k.section == section && k.key == key)
                    return k.flag;
            }
            return std::nullopt;
        }

        /// Parses the key-value config text into flag-name -> value.
        /// Grammar: `[section]` headers, `key = value` lines, `#`/`;` comments.
        inline std::map<std::string, std::string> parse_text(std::istream& in)
        {
            std::map<std::string, std::string> values;
            std::string line, section;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                const auto hash = line.find_first_of("#;");
                std::string s = trim(hash == std::string::npos ? std::string_view(line) : std::string_view(line).substr(0, hash));
                if (s.empty())
                    continue;
                if (s.front() == '[') {
                    if (s.back() != ']')
                        throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
                    section = trim(std::string_view(s).substr(1, s.size() - 2));
                    continue;
                }
                const auto eq = s.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("line " + std::to_string(lineno), "expected key = value");
                const std::string key = trim(std::string_view(s).substr(0, eq));
                const std::string value = trim(std::string_view(s).substr(eq + 1));
                const auto flag = flag_for(section, key);
                if (!flag)
                    throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
                values[std::string(*flag)] = value;
            }
            return values;
        }

        template <typename T>
        T parse_number(const std::string& field, const std::string& value)
        {
            T v{};
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw ConfigError(field, "invalid number '" + value + "'");
            return v;
        }

        inline std::vector<std::string> split_list(const std::string& value, std::string_view seps)
        {
            std::vector<std::string> out;
            std::string cur;
            for (char c : value) {
                if (seps.find(c) != std::string_view::npos) {
                    if (!trim(cur).empty())
                        out.push_back(trim(cur));
                    cur.clear();
                }
                else
                    cur += c;
            }
            if (!trim(cur).empty())
                out.push_back(trim(cur));
            return out;
        }

        inline void apply(ExperimentConfig& cfg, const std::string& field, const std::string& value)
        {
            if (field == "task") {
                auto t = parse_task_name(value);
                if (!t)
                    throw ConfigError(field, "unknown task '" + value + "'");
                cfg.task = *t;
            }
            else if (field == "dim")
                cfg.dim = parse_number<int>(field, value);
            else if (field == "resolution") {
                cfg.resolution.clear();
                for (const auto& part : split_list(value, "x,"))
                    cfg.resolution.push_back(parse_number<int>(field, part));
                if (cfg.resolution.size() == 1)
                    cfg.resolution.push_back(cfg.resolution.front());
            }
            else if (field == "sigma0")
                cfg.sigma0 = parse_number<double>(field, value);
            else if (field == "variant") {
                cfg.variants.clear();
                for (const auto& part : split_list(value, ", ")) {
                    if (part == "all") {
                        cfg.variants.assign(all_variants.begin(), all_variants.end());
                        continue;
                    }
                    auto v = parse_variant(part);
                    if (!v)
                        throw ConfigError(field, "unknown variant '" + part + "'");
                    if (std::find(cfg.variants.begin(), cfg.variants.end(), *v) == cfg.variants.end())
                        cfg.variants.push_back(*v);
                }
            }
            else if (field == "generations")
                cfg.generations = parse_number<long>(field, value);
            else if (field == "slots")
                cfg.slots = parse_number<int>(field, value);
            else if (field == "batch")
                cfg.batch = parse_number<int>(field, value);
            else if (field == "init-samples")
                cfg.init_samples = parse_number<int>(field, value);
            else if (field == "replications")
                cfg.replications = parse_number<int>(field, value);
            else if (field == "seed")
                cfg.base_seed = parse_number<std::uint64_t>(field, value);
            else if (field == "metrics-every")
                cfg.metrics_every = parse_number<long>(field, value);
            else if (field == "threads")
                cfg.threads = parse_number<int>(field, value);
            else if (field == "out")
                cfg.out = value;
            else if (field == "mix-smoothing")
                cfg.mix_smoothing = parse_number<int>(field, value);
            else if (field == "zeta")
                cfg.zeta = parse_number<double>(field, value);
            else if (field == "window")
                cfg.window = parse_number<int>(field, value);
            else if (field == "stats-granularity") {
                if (value == "instance")
                    cfg.granularity = StatsGranularity::Instance;
                else if (value == "kind")
                    cfg.granularity = StatsGranularity::Kind;
                else
                    throw ConfigError(field, "expected instance or kind");
            }
            else
                throw ConfigError(field, "unknown key");
        }

        inline void validate(const ExperimentConfig& cfg)
        {
            if (cfg.dim < 2)
                throw ConfigError("dim", "must be at least 2");
            if (cfg.resolution.size() != 2 || cfg.resolution[0] < 1 || cfg.resolution[1] < 1)
                throw ConfigError("resolution", "expected two positive cell counts, e.g. 100x100");
            if (cfg.sigma0 && !(*cfg.sigma0 > 0.))
                throw ConfigError("sigma0", "must be positive");
            if (cfg.variants.empty())
                throw ConfigError("variant", "at least one variant required");
            if (cfg.replications < 1)
                throw ConfigError("replications", "must be at least 1");
            if (cfg.generations < 1)
                throw ConfigError("generations", "must be at least 1");
            if (cfg.slots < 1)
                throw ConfigError("slots", "must be at least 1");
            if (cfg.batch < 2)
                throw ConfigError("batch", "must be at least 2");
            if (cfg.init_samples < 1)
                throw ConfigError("init-samples", "must be at least 1");
            if (!(cfg.zeta >= 0.))
                throw ConfigError("zeta", "must be non-negative");
            if (cfg.window < 1)
                throw ConfigError("window", "must be at least 1");
            if (cfg.metrics_every < 1)
                throw ConfigError("metrics-every", "must be at least 1");
            if (cfg.threads < 1)
                throw ConfigError("threads", "must be at least 1");
            if (cfg.mix_smoothing < 0)
                throw ConfigError("mix-smoothing", "must be non-negative");
            if (cfg.out.empty())
                throw ConfigError("out", "must not be empty");
            for (Variant v : cfg.variants)
                if (v == Variant::MeMapElitesUniform && cfg.slots % num_kinds != 0)
                    throw ConfigError("slots", "uniform variant needs a multiple of 4 slots");
        }

    } // namespace config

    /// Builds an experiment config from an optional key-value file and flag
    /// values (flag name -> value). Precedence: flags, then file, then
    /// `fallbacks` (e.g. environment), then built-in defaults. The task is
    /// required.
    inline ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file, const std::map<std::string, std::string>& flags,
                                         const std::map<std::string, std::string>& fallbacks = {})
    {
        std::map<std::string, std::string> values = fallbacks;
        if (file) {
            std::ifstream in(*file);
            if (!in)
                throw ConfigError("config", "cannot open " + file->string());
            for (auto& [k, v] : config::parse_text(in))
                values[k] = v;
        }
        for (const auto& [k, v] : flags)
            values[k] = v;
        if (!values.contains("task"))
            throw ConfigError("task", "required");

        ExperimentConfig cfg;
        for (const auto& [k, v] : values)
            config::apply(cfg, k, v);
        config::validate(cfg);
        return cfg;
    }

} // namespace memap

#endif
