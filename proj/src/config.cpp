#include "degen_taxis/config.hpp"

#include "degen_taxis/error.hpp"
#include "degen_taxis/io.hpp"

#include <charconv>
#include <functional>
#include <set>
#include <sstream>

namespace degen_taxis
{

namespace
{

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct BadValue
{
    std::string reason;
};

double to_double(const std::string& s)
{
    std::size_t used = 0;
    double x = 0;
    try
    {
        x = std::stod(s, &used);
    }
    catch (const std::exception&)
    {
        throw BadValue{"expected a number, got '" + s + "'"};
    }
    if (used != s.size())
        throw BadValue{"expected a number, got '" + s + "'"};
    return x;
}

long long to_int(const std::string& s)
{
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw BadValue{"expected an integer, got '" + s + "'"};
    return x;
}

std::uint64_t to_uint(const std::string& s)
{
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw BadValue{"expected an unsigned integer, got '" + s + "'"};
    return x;
}

std::vector<double> to_list(const std::string& s)
{
    std::vector<double> out;
    if (s.empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(trim(item)));
    return out;
}

std::optional<double> to_optional(const std::string& s)
{
    if (s == "none")
        return std::nullopt;
    return to_double(s);
}

std::string show(double x)
{
    return format_double(x);
}

std::string show(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k)
        out += (k ? "," : "") + format_double(xs[k]);
    return out;
}

std::string show(const std::optional<double>& x)
{
    return x ? format_double(*x) : "none";
}

struct Key
{
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys()
{
    using C = RunConfig;
    using S = const std::string&;
    static const std::vector<Key> table{
        {"grid.nx", [](C& c, S v) { c.nx = static_cast<int>(to_int(v)); },
         [](const C& c) { return std::to_string(c.nx); }},
        {"grid.ny", [](C& c, S v) { c.ny = static_cast<int>(to_int(v)); },
         [](const C& c) { return std::to_string(c.ny); }},
        {"grid.lx", [](C& c, S v) { c.lx = to_double(v); }, [](const C& c) { return show(c.lx); }},
        {"grid.ly", [](C& c, S v) { c.ly = to_double(v); }, [](const C& c) { return show(c.ly); }},
        {"params.chi", [](C& c, S v) { c.params.chi = to_double(v); },
         [](const C& c) { return show(c.params.chi); }},
        {"params.ell", [](C& c, S v) { c.params.ell = to_double(v); },
         [](const C& c) { return show(c.params.ell); }},
        {"params.eps", [](C& c, S v) { c.params.eps = to_double(v); },
         [](const C& c) { return show(c.params.eps); }},
        {"step.cfl_safety", [](C& c, S v) { c.step.cfl_safety = to_double(v); },
         [](const C& c) { return show(c.step.cfl_safety); }},
        {"step.dt_min", [](C& c, S v) { c.step.dt_min = to_double(v); },
         [](const C& c) { return show(c.step.dt_min); }},
        {"step.dt_max", [](C& c, S v) { c.step.dt_max = to_double(v); },
         [](const C& c) { return show(c.step.dt_max); }},
        {"step.t_end", [](C& c, S v) { c.step.t_end = to_double(v); },
         [](const C& c) { return show(c.step.t_end); }},
        {"step.max_rejections",
         [](C& c, S v) { c.step.max_rejections_per_step = static_cast<int>(to_int(v)); },
         [](const C& c) { return std::to_string(c.step.max_rejections_per_step); }},
        {"step.fixed_dt", [](C& c, S v) { c.step.fixed_dt = to_optional(v); },
         [](const C& c) { return show(c.step.fixed_dt); }},
        {"step.u_ceiling", [](C& c, S v) { c.step.u_ceiling = to_double(v); },
         [](const C& c) { return show(c.step.u_ceiling); }},
        {"step.stop_below_sup_v", [](C& c, S v) { c.step.stop_below_sup_v = to_optional(v); },
         [](const C& c) { return show(c.step.stop_below_sup_v); }},
        {"step.snapshot_times", [](C& c, S v) { c.step.snapshot_times = to_list(v); },
         [](const C& c) { return show(c.step.snapshot_times); }},
        {"diag.b", [](C& c, S v) { c.diag.b = to_double(v); },
         [](const C& c) { return show(c.diag.b); }},
        {"diag.p_list", [](C& c, S v) { c.diag.p_list = to_list(v); },
         [](const C& c) { return show(c.diag.p_list); }},
        {"diag.stride", [](C& c, S v) { c.diag.stride = static_cast<int>(to_int(v)); },
         [](const C& c) { return std::to_string(c.diag.stride); }},
        {"diag.positivity_floor", [](C& c, S v) { c.diag.positivity_floor = to_double(v); },
         [](const C& c) { return show(c.diag.positivity_floor); }},
        {"diag.dictionary_size",
         [](C& c, S v) { c.diag.dictionary_size = static_cast<int>(to_int(v)); },
         [](const C& c) { return std::to_string(c.diag.dictionary_size); }},
        {"init.preset", [](C& c, S v) { c.preset = v; }, [](const C& c) { return c.preset; }},
        {"init.v_bar", [](C& c, S v) { c.v_bar = to_double(v); },
         [](const C& c) { return show(c.v_bar); }},
        {"run.seed", [](C& c, S v) { c.seed = to_uint(v); },
         [](const C& c) { return std::to_string(c.seed); }},
        {"run.output_dir", [](C& c, S v) { c.output_dir = v; },
         [](const C& c) { return c.output_dir; }},
    };
    return table;
}

} // namespace

void RunConfig::validate() const
{
    (void)grid();
    params.validate();
    step.validate();
    diag.validate();
    static const std::set<std::string> presets{"homogeneous", "branching", "small_v0", "eps_study",
                                               "longtime"};
    if (!presets.count(preset))
        throw Error(ErrorCode::UnknownPreset, "unknown preset '" + preset + "'");
    if (!(v_bar > 0.0))
        throw Error(ErrorCode::RangeError, "init.v_bar must be > 0 (nutrient must be positive)");
    if (output_dir.empty())
        throw Error(ErrorCode::RangeError, "run.output_dir must not be empty");
}

RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(ErrorCode::ParseError, where + ": empty key");

        const Key* entry = nullptr;
        for (const auto& k : keys())
            if (key == k.name)
                entry = &k;
        if (!entry)
            throw Error(ErrorCode::UnknownKey, where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw Error(ErrorCode::ParseError, where + ": duplicate key '" + key + "'");
        try
        {
            entry->set(cfg, value);
        }
        catch (const BadValue& bad)
        {
            throw Error(ErrorCode::ParseError, where + ": " + key + ": " + bad.reason);
        }
    }
    cfg.validate();
    return cfg;
}

std::string serialize_config(const RunConfig& c)
{
    std::string out;
    for (const auto& k : keys())
        out += std::string(k.name) + " = " + k.get(c) + "\n";
    return out;
}

} // namespace degen_taxis
