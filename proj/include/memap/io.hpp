#ifndef MEMAP_IO_HPP
#define MEMAP_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <memap/archive.hpp>
#include <memap/error.hpp>
#include <memap/metrics.hpp>

namespace memap::io {

    /// Shortest decimal representation that parses back to the same double.
    inline std::string format_double(double v)
    {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        if (ec != std::errc())
            throw RunOutputError("failed to format number");
        return std::string(buf, ptr);
    }

    inline double parse_double(std::string_view s)
    {
        double v = 0.;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw InvalidArgument("malformed number '" + std::string(s) + "'");
        return v;
    }

    inline long parse_long(std::string_view s)
    {
        long v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw InvalidArgument("malformed integer '" + std::string(s) + "'");
        return v;
    }

    inline std::vector<std::string> split(std::string_view line, char sep = ',')
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(sep, start);
            out.emplace_back(line.substr(start, pos - start));
            if (pos == std::string_view::npos)
                break;
            start = pos + 1;
        }
        return out;
    }

    /// Reads a CSV file: header fields and data rows.
    struct Table {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        int column(std::string_view name) const
        {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i] == name)
                    return static_cast<int>(i);
            throw InvalidArgument("missing column '" + std::string(name) + "'");
        }
    };

    inline Table parse_table(std::istream& in)
    {
        Table t;
        std::string line;
        if (!std::getline(in, line))
            throw InvalidArgument("empty csv");
        t.header = split(line);
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            auto row = split(line);
            if (row.size() != t.header.size())
                throw InvalidArgument("csv row has wrong field count");
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    inline Table read_table(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw RunOutputError("cannot open " + path.string());
        return parse_table(in);
    }

    inline void write_file(const std::filesystem::path& path, const std::string& content)
    {
        std::error_code ec;
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw RunOutputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw RunOutputError("cannot open " + path.string() + " for writing");
        out << content;
        if (!out)
            throw RunOutputError("write failed for " + path.string());
    }

    inline constexpr std::string_view metrics_header = "generation,evaluations,archive_size,best_fitness,qd_score,opt_count,dir_count,imp_count,rand_count";

    inline std::string metrics_csv(const std::vector<GenerationRecord>& records)
    {
        std::ostringstream os;
        os << metrics_header << '\n';
        for (const auto& r : records) {
            os << r.generation << ',' << r.evaluations << ',' << r.archive_size << ',' << format_double(r.best_fitness_norm) << ','
               << format_double(r.qd_score);
            for (int c : r.active_kind_counts)
                os << ',' << c;
            os << '\n';
        }
        return os.str();
    }

    inline std::vector<GenerationRecord> parse_metrics_csv(std::istream& in)
    {
        const Table t = parse_table(in);
        if (t.header != split(metrics_header))
            throw InvalidArgument("unexpected metrics header");
        std::vector<GenerationRecord> out;
        for (const auto& row : t.rows) {
            GenerationRecord r;
            r.generation = parse_long(row[0]);
            r.evaluations = parse_long(row[1]);
            r.archive_size = parse_long(row[2]);
            r.best_fitness_norm = parse_double(row[3]);
            r.qd_score = parse_double(row[4]);
            for (int k = 0; k < num_kinds; ++k)
                r.active_kind_counts[k] = static_cast<int>(parse_long(row[5 + k]));
            out.push_back(r);
        }
        return out;
    }

    /// Archive dump: cell_index, descriptor, raw and normalised fitness,
    /// genotype; ascending cell index.
    inline std::string archive_csv(const Archive& a)
    {
        std::ostringstream os;
        const int bd = a.spec().dims();
        const Eigen::Index gdim = a.empty() ? 0 : a.entries().front().elite.genotype.size();
        os << "cell_index";
        for (int k = 0; k < bd; ++k)
            os << ",bd_" << k;
        os << ",fitness_raw,fitness_norm";
        for (Eigen::Index i = 0; i < gdim; ++i)
            os << ",g_" << i;
        os << '\n';
        for (const auto& en : a) {
            os << en.cell;
            for (int k = 0; k < bd; ++k)
                os << ',' << format_double(en.elite.descriptor[k]);
            os << ',' << format_double(en.elite.fitness_raw) << ',' << format_double(en.elite.fitness_norm);
            for (Eigen::Index i = 0; i < en.elite.genotype.size(); ++i)
                os << ',' << format_double(en.elite.genotype[i]);
            os << '\n';
        }
        return os.str();
    }

    struct ArchiveRow {
        CellIndex cell = 0;
        Elite elite;
    };

    inline std::vector<ArchiveRow> parse_archive_csv(std::istream& in)
    {
        const Table t = parse_table(in);
        int bd = 0, gdim = 0;
        for (const auto& h : t.header) {
            if (h.rfind("bd_", 0) == 0)
                ++bd;
            else if (h.rfind("g_", 0) == 0)
                ++gdim;
        }
        const int raw_col = t.column("fitness_raw");
        const int norm_col = t.column("fitness_norm");
        std::vector<ArchiveRow> out;
        for (const auto& row : t.rows) {
            ArchiveRow r;
            r.cell = parse_long(row[0]);
            r.elite.descriptor.resize(bd);
            for (int k = 0; k < bd; ++k)
                r.elite.descriptor[k] = parse_double(row[1 + k]);
            r.elite.fitness_raw = parse_double(row[raw_col]);
            r.elite.fitness_norm = parse_double(row[norm_col]);
            r.elite.genotype.resize(gdim);
            for (int i = 0; i < gdim; ++i)
                r.elite.genotype[i] = parse_double(row[norm_col + 1 + i]);
            out.push_back(std::move(r));
        }
        return out;
    }

    inline std::string aggregate_csv(const std::vector<QuartileRow>& rows)
    {
        std::ostringstream os;
        os << "generation";
        for (const char* m : {"archive_size", "best_fitness", "qd_score"})
            os << ',' << m << "_q1," << m << "_median," << m << "_q3";
        os << '\n';
        for (const auto& r : rows) {
            os << r.generation;
            for (const auto* arr : {&r.archive_size, &r.best_fitness, &r.qd_score})
                for (double v : *arr)
                    os << ',' << format_double(v);
            os << '\n';
        }
        return os.str();
    }

} // namespace memap::io

#endif
