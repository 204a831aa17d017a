#include "degen_taxis/io.hpp"

#include "degen_taxis/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace degen_taxis
{

namespace
{

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where)
{
    std::size_t used = 0;
    double x = 0;
    try
    {
        x = std::stod(text, &used);
    }
    catch (const std::exception&)
    {
        throw Error(ErrorCode::ParseError, where + ": not a number: '" + text + "'");
    }
    if (used != text.size())
        throw Error(ErrorCode::ParseError, where + ": trailing characters in '" + text + "'");
    return x;
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void write_series_csv(std::ostream& os, const std::vector<DiagRecord>& samples,
                      const std::vector<double>& p_list, const SeriesContext& ctx)
{
    os << "# chi = " << format_double(ctx.params.chi) << '\n'
       << "# ell = " << format_double(ctx.params.ell) << '\n'
       << "# eps = " << format_double(ctx.params.eps) << '\n'
       << "# area = " << format_double(ctx.area) << '\n'
       << "# h = " << format_double(ctx.h) << '\n'
       << "# dt_mean = " << format_double(ctx.dt_mean) << '\n'
       << "# u_ceiling = " << format_double(ctx.u_ceiling) << '\n';
    const auto cols = record_columns(p_list);
    for (std::size_t k = 0; k < cols.size(); ++k)
        os << (k ? "," : "") << cols[k];
    os << '\n';
    for (const auto& r : samples)
    {
        if (r.lp_u.size() != p_list.size())
            throw Error(ErrorCode::IoError, "record has a different L^p exponent list");
        const auto row = record_row(r);
        for (std::size_t k = 0; k < row.size(); ++k)
            os << (k ? "," : "") << format_double(row[k]);
        os << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const std::vector<DiagRecord>& samples,
                      const std::vector<double>& p_list, const SeriesContext& ctx)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    write_series_csv(os, samples, p_list, ctx);
}

SeriesFile read_series_csv(std::istream& is)
{
    SeriesFile file;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(is, line))
    {
        ++line_no;
        const std::string where = "line " + std::to_string(line_no);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#')
        {
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = trim(t.substr(1, eq - 1));
            const double value = parse_number(trim(t.substr(eq + 1)), where);
            if (key == "chi")
                file.context.params.chi = value;
            else if (key == "ell")
                file.context.params.ell = value;
            else if (key == "eps")
                file.context.params.eps = value;
            else if (key == "area")
                file.context.area = value;
            else if (key == "h")
                file.context.h = value;
            else if (key == "dt_mean")
                file.context.dt_mean = value;
            else if (key == "u_ceiling")
                file.context.u_ceiling = value;
            continue;
        }
        if (!have_header)
        {
            file.columns = split_commas(t);
            have_header = true;
            continue;
        }
        const auto cells = split_commas(t);
        if (cells.size() != file.columns.size())
            throw Error(ErrorCode::ParseError, where + ": expected " +
                                                   std::to_string(file.columns.size()) +
                                                   " columns, got " + std::to_string(cells.size()));
        std::vector<double> values;
        values.reserve(cells.size());
        for (const auto& c : cells)
            values.push_back(parse_number(c, where));
        file.samples.push_back(record_from_row(file.columns, values));
    }
    if (!have_header)
        throw Error(ErrorCode::ParseError, "series file has no header row");
    return file;
}

SeriesFile read_series_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_series_csv(is);
}

std::string encode_pgm16(const ScalarField& f)
{
    const GridSpec& g = f.grid();
    const double lo = f.min(), hi = f.max();
    std::string out = "P5\n" + std::to_string(g.nx()) + " " + std::to_string(g.ny()) + "\n65535\n";
    out.reserve(out.size() + 2 * f.size());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
        {
            unsigned level = 0;
            if (hi > lo)
                level = static_cast<unsigned>(std::lround((f(i, j) - lo) / (hi - lo) * 65535.0));
            out.push_back(static_cast<char>((level >> 8) & 0xff));
            out.push_back(static_cast<char>(level & 0xff));
        }
    return out;
}

ScalarField decode_pgm16(const std::string& bytes, const GridSpec& grid, double min, double max)
{
    std::istringstream is(bytes);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    is >> magic >> w >> h >> maxval;
    is.get();
    if (magic != "P5" || w != grid.nx() || h != grid.ny() || maxval != 65535)
        throw Error(ErrorCode::ParseError, "not a 16-bit PGM for this grid");
    ScalarField f(grid);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i)
        {
            const int hi = is.get(), lo = is.get();
            if (hi < 0 || lo < 0)
                throw Error(ErrorCode::ParseError, "truncated PGM data");
            const unsigned level = (static_cast<unsigned>(hi) << 8) | static_cast<unsigned>(lo);
            f(i, j) = min + (max - min) * level / 65535.0;
        }
    return f;
}

void write_snapshot(const std::filesystem::path& stem, const ScalarField& f,
                    const SnapshotMeta& meta)
{
    std::filesystem::path pgm = stem;
    pgm += ".pgm";
    std::filesystem::path side = stem;
    side += ".json";
    {
        std::ofstream os(pgm, std::ios::binary);
        if (!os)
            throw Error(ErrorCode::IoError, "cannot open " + pgm.string());
        const std::string bytes = encode_pgm16(f);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    const GridSpec& g = f.grid();
    nlohmann::ordered_json j;
    j["t"] = meta.t;
    j["field"] = meta.field;
    j["min"] = meta.min;
    j["max"] = meta.max;
    j["nx"] = g.nx();
    j["ny"] = g.ny();
    j["lx"] = g.lx();
    j["ly"] = g.ly();
    std::ofstream os(side, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot open " + side.string());
    os << j.dump(2) << '\n';
}

} // namespace degen_taxis
