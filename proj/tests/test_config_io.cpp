#include "degen_taxis/config.hpp"
#include "degen_taxis/error.hpp"
#include "degen_taxis/io.hpp"
#include "degen_taxis/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace degen_taxis;

namespace
{

struct Caught
{
    ErrorCode code;
    std::string message;
};

Caught catch_error(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return {e.code(), e.what()};
    }
    FAIL("expected an Error");
    return {ErrorCode::IoError, ""};
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("empty config yields the documented defaults")
{
    const RunConfig c = parse_config("");
    CHECK(c == RunConfig{});
    CHECK(c.nx == 64);
    CHECK(c.ny == 64);
    CHECK(c.params.chi == 1.0);
    CHECK(c.params.ell == 0.0);
    CHECK(c.params.eps == 0.01);
    CHECK(c.step.cfl_safety == 0.4);
    CHECK(c.step.dt_max == 0.01);
    CHECK(c.step.t_end == 1.0);
    CHECK_FALSE(c.step.fixed_dt.has_value());
    CHECK_FALSE(c.step.stop_below_sup_v.has_value());
    CHECK(c.diag.p_list == std::vector<double>{2.0, 3.0, 5.0});
    CHECK(c.preset == "homogeneous");
    CHECK(c.seed == 1);
    CHECK(parse_config("# nothing but a comment\n\n   \n") == RunConfig{});
}

TEST_CASE("config values and comments")
{
    const RunConfig c = parse_config("grid.nx = 32   # coarse\n"
                                     "grid.ly=2\n"
                                     "params.chi = 2.5\n"
                                     "step.fixed_dt = 1e-4\n"
                                     "step.snapshot_times = 0, 0.25, 0.5\n"
                                     "diag.p_list = 2,4\n"
                                     "init.preset = branching\n"
                                     "run.seed = 18446744073709551615\n"
                                     "run.output_dir = results/a b\n");
    CHECK(c.nx == 32);
    CHECK(c.ny == 64);
    CHECK(c.ly == 2.0);
    CHECK(c.params.chi == 2.5);
    REQUIRE(c.step.fixed_dt.has_value());
    CHECK(*c.step.fixed_dt == 1e-4);
    CHECK(c.step.snapshot_times == std::vector<double>{0.0, 0.25, 0.5});
    CHECK(c.diag.p_list == std::vector<double>{2.0, 4.0});
    CHECK(c.preset == "branching");
    CHECK(c.seed == 18446744073709551615ull);
    CHECK(c.output_dir == "results/a b");
    CHECK(c.grid().nx() == 32);
    CHECK(c.grid().ly() == 2.0);
}

TEST_CASE("config errors")
{
    const Caught chi = catch_error([] { parse_config("params.chi = -1\n"); });
    CHECK(chi.code == ErrorCode::RangeError);
    CHECK(chi.message.find("chi > 0") != std::string::npos);

    CHECK(catch_error([] { parse_config("params.kappa = 1\n"); }).code == ErrorCode::UnknownKey);

    const Caught bad = catch_error([] { parse_config("grid.nx = 8\n\ngrid.ny = eight\n"); });
    CHECK(bad.code == ErrorCode::ParseError);
    CHECK(bad.message.find("line 3") != std::string::npos);

    const Caught dup = catch_error([] { parse_config("grid.nx = 8\ngrid.nx = 9\n"); });
    CHECK(dup.code == ErrorCode::ParseError);
    CHECK(dup.message.find("line 2") != std::string::npos);

    const Caught noeq = catch_error([] { parse_config("grid.nx 8\n"); });
    CHECK(noeq.code == ErrorCode::ParseError);
    CHECK(noeq.message.find("line 1") != std::string::npos);

    CHECK(catch_error([] { parse_config("grid.nx = 1\n"); }).code == ErrorCode::InvalidGrid);
    CHECK(catch_error([] { parse_config("grid.nx = 8.5\n"); }).code == ErrorCode::ParseError);
    CHECK(catch_error([] { parse_config("params.eps = 1\n"); }).code == ErrorCode::RangeError);
    CHECK(catch_error([] { parse_config("step.snapshot_times = 0.5, 0.1\n"); }).code ==
          ErrorCode::RangeError);
    CHECK(catch_error([] { parse_config("init.preset = spiral\n"); }).code ==
          ErrorCode::UnknownPreset);
    CHECK(catch_error([] { parse_config("init.v_bar = 0\n"); }).code == ErrorCode::RangeError);
}

TEST_CASE("serialize then parse is the identity")
{
    RunConfig c;
    c.nx = 17;
    c.ny = 9;
    c.lx = 1.0 / 3.0;
    c.ly = 2.0 + 1e-15;
    c.params = Params{0.7, 1.25, 0.033};
    c.step.fixed_dt = 3e-5;
    c.step.stop_below_sup_v = 1e-3;
    c.step.snapshot_times = {0.0, 0.1, 1.0 / 7.0};
    c.step.max_rejections_per_step = 3;
    c.diag.p_list = {1.5, 2.0};
    c.diag.stride = 4;
    c.preset = "longtime";
    c.v_bar = 0.0123;
    c.seed = 987654321987654321ull;
    c.output_dir = "some/where";
    CHECK(parse_config(serialize_config(c)) == c);
    CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
    CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
}

TEST_CASE("series csv round trip")
{
    const GridSpec g(12, 10, 1.0, 1.0);
    const auto u0 = ScalarField::from_function(g, [](double x, double y) { return 1.0 + 0.4 * std::cos(3.0 * x) * y; });
    const auto v0 = ScalarField::from_function(g, [](double x, double) { return 0.5 + x; });
    StepControl c;
    c.t_end = 0.05;
    DiagConfig d;
    d.stride = 3;
    const Params p{1.0, 1.0, 0.01};
    const Trajectory tr = run(u0, v0, p, c, d);
    const SeriesContext ctx = context_of(tr, p, c);

    std::stringstream ss;
    write_series_csv(ss, tr.samples, d.p_list, ctx);
    const SeriesFile back = read_series_csv(ss);
    CHECK(back.columns == record_columns(d.p_list));
    REQUIRE(back.samples.size() == tr.samples.size());
    for (std::size_t k = 0; k < tr.samples.size(); ++k)
        CHECK(record_row(back.samples[k]) == record_row(tr.samples[k]));
    CHECK(back.context.params.chi == ctx.params.chi);
    CHECK(back.context.params.ell == ctx.params.ell);
    CHECK(back.context.params.eps == ctx.params.eps);
    CHECK(back.context.area == ctx.area);
    CHECK(back.context.h == ctx.h);
    CHECK(back.context.dt_mean == ctx.dt_mean);
    CHECK(back.context.u_ceiling == ctx.u_ceiling);

    std::stringstream broken("t,mass_u\n0.0,not-a-number\n");
    CHECK_THROWS_AS(read_series_csv(broken), Error);
    CHECK(catch_error([] { read_series_csv(std::filesystem::path("/nonexistent/series.csv")); }).code ==
          ErrorCode::IoError);
}

TEST_CASE("format_double keeps 17 significant digits")
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("pgm encoding")
{
    const GridSpec g(5, 3, 1.0, 1.0);
    ScalarField f(g);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 5; ++i)
            f(i, j) = i + 10.0 * j;
    const std::string bytes = encode_pgm16(f);
    const std::string header = "P5\n5 3\n65535\n";
    REQUIRE(bytes.size() == header.size() + 2 * 15);
    CHECK(bytes.substr(0, header.size()) == header);
    auto pixel = [&](int row, int col) {
        const std::size_t at = header.size() + 2 * (row * 5 + col);
        return 256 * static_cast<unsigned char>(bytes[at]) + static_cast<unsigned char>(bytes[at + 1]);
    };
    CHECK(pixel(0, 0) == 0);
    CHECK(pixel(2, 4) == 65535);

    const ScalarField back = decode_pgm16(bytes, g, f.min(), f.max());
    const double quantum = (f.max() - f.min()) / 65535.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        CHECK(std::abs(back[k] - f[k]) <= quantum);

    const std::string flat = encode_pgm16(ScalarField(g, 4.0));
    for (std::size_t k = header.size(); k < flat.size(); ++k)
        CHECK(flat[k] == '\0');
}

TEST_CASE("snapshot files")
{
    const auto dir = std::filesystem::temp_directory_path() / "degen_taxis_snapshot_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const GridSpec g(6, 4, 2.0, 1.0);
    const auto f = ScalarField::from_function(g, [](double x, double y) { return x * y; });
    write_snapshot(dir / "u_0", f, SnapshotMeta{0.5, "u", f.min(), f.max()});
    REQUIRE(std::filesystem::exists(dir / "u_0.pgm"));
    REQUIRE(std::filesystem::exists(dir / "u_0.json"));
    CHECK(slurp(dir / "u_0.pgm") == encode_pgm16(f));
    const std::string meta = slurp(dir / "u_0.json");
    CHECK(meta.find("\"field\"") != std::string::npos);
    CHECK(meta.find("\"u\"") != std::string::npos);
    CHECK(meta.find("\"t\"") != std::string::npos);
    CHECK(meta.find("\"min\"") != std::string::npos);
    CHECK(meta.find("\"max\"") != std::string::npos);
    std::filesystem::remove_all(dir);
}
