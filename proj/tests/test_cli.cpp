#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace
{

struct Outcome
{
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const fs::path& scratch()
{
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "degen_taxis_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Outcome cli(const std::string& args, const std::string& env = "")
{
    const fs::path out = scratch() / "stdout.txt";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = env + " \"" DEGEN_TAXIS_CLI "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

const std::string homog_cfg = "grid.nx = 16\n"
                              "grid.ny = 16\n"
                              "params.chi = 1\n"
                              "params.ell = 0\n"
                              "params.eps = 0\n"
                              "step.t_end = 0.5\n"
                              "step.snapshot_times = 0, 0.25\n"
                              "diag.stride = 5\n"
                              "init.preset = homogeneous\n";

} // namespace

TEST_CASE("simulate writes a consistent run directory")
{
    const fs::path cfg = write_config("homog.cfg", homog_cfg);
    const fs::path out = scratch() / "sim_a";
    const Outcome o = cli("simulate --config \"" + cfg.string() + "\" --seed 1 --out \"" + out.string() + "\"");
    REQUIRE(o.status == 0);
    const json line = json::parse(o.out);
    CHECK(line["pass"] == true);

    REQUIRE(fs::exists(out / "series.csv"));
    REQUIRE(fs::exists(out / "summary.json"));
    CHECK(fs::exists(out / "u_final.pgm"));
    CHECK(fs::exists(out / "v_final.json"));
    CHECK(fs::exists(out / "u_0.pgm"));
    CHECK(fs::exists(out / "v_1.pgm"));

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["pass"] == true);
    CHECK(summary["config"].get<std::string>().find("grid.nx = 16") != std::string::npos);
    const double sup_v = summary["extrema"]["final_sup_v"].get<double>();
    CHECK(std::abs(sup_v - std::exp(-0.5)) <= 2e-3);

    const Outcome inv = cli("invariants --series \"" + (out / "series.csv").string() + "\"");
    CHECK(inv.status == 0);
    CHECK(json::parse(inv.out)["pass"] == true);
}

TEST_CASE("simulate output is byte-identical across runs")
{
    const fs::path cfg = write_config("homog_det.cfg", homog_cfg);
    const fs::path a = scratch() / "det_a";
    const fs::path b = scratch() / "det_b";
    REQUIRE(cli("simulate --config \"" + cfg.string() + "\" --seed 4 --out \"" + a.string() + "\"").status == 0);
    REQUIRE(cli("simulate --config \"" + cfg.string() + "\" --seed 4 --out \"" + b.string() + "\"").status == 0);
    for (const char* name : {"series.csv", "u_final.pgm", "v_final.pgm", "u_1.pgm"})
    {
        CAPTURE(name);
        CHECK(slurp(a / name) == slurp(b / name));
        CHECK_FALSE(slurp(a / name).empty());
    }
}

TEST_CASE("output directory override order")
{
    const fs::path cfg = write_config("homog_env.cfg", homog_cfg + "run.output_dir = " +
                                                          (scratch() / "from_config").string() + "\n");
    const fs::path env_dir = scratch() / "from_env";
    const Outcome o = cli("simulate --config \"" + cfg.string() + "\"",
                          "DEGEN_TAXIS_OUT=\"" + env_dir.string() + "\"");
    REQUIRE(o.status == 0);
    CHECK(fs::exists(env_dir / "series.csv"));
    CHECK_FALSE(fs::exists(scratch() / "from_config"));

    const fs::path flag_dir = scratch() / "from_flag";
    const Outcome f = cli("simulate --config \"" + cfg.string() + "\" --out \"" + flag_dir.string() + "\"",
                          "DEGEN_TAXIS_OUT=\"" + (scratch() / "unused_env").string() + "\"");
    REQUIRE(f.status == 0);
    CHECK(fs::exists(flag_dir / "series.csv"));
    CHECK_FALSE(fs::exists(scratch() / "unused_env"));
}

TEST_CASE("invariants flags a tampered series")
{
    const fs::path cfg = write_config("homog_tamper.cfg", homog_cfg);
    const fs::path out = scratch() / "tamper";
    REQUIRE(cli("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"").status == 0);

    std::istringstream in(slurp(out / "series.csv"));
    std::ostringstream edited;
    std::string line;
    std::size_t columns_at = std::string::npos;
    int data_rows = 0;
    while (std::getline(in, line))
    {
        if (!line.empty() && line[0] != '#' && columns_at == std::string::npos)
        {
            columns_at = 0;
            std::istringstream header(line);
            std::string name;
            std::size_t k = 0;
            while (std::getline(header, name, ','))
            {
                if (name == "sup_v")
                    columns_at = k;
                ++k;
            }
            edited << line << '\n';
            continue;
        }
        if (!line.empty() && line[0] != '#' && ++data_rows == 3)
        {
            std::istringstream row(line);
            std::string cell;
            std::size_t k = 0;
            std::string rebuilt;
            while (std::getline(row, cell, ','))
            {
                if (k == columns_at)
                    cell = "5.0";
                rebuilt += (k ? "," : "") + cell;
                ++k;
            }
            line = rebuilt;
        }
        edited << line << '\n';
    }
    REQUIRE(columns_at != 0);
    const fs::path bad = scratch() / "tampered.csv";
    std::ofstream(bad) << edited.str();

    const Outcome o = cli("invariants --series \"" + bad.string() + "\"");
    CHECK(o.status != 0);
    CHECK(o.status == 1);
    const json report = json::parse(o.out);
    CHECK(report["pass"] == false);
}

TEST_CASE("moser subcommand reports the closed-form bound")
{
    const Outcome o = cli("moser");
    REQUIRE(o.status == 0);
    const json j = json::parse(o.out);
    CHECK(j["pass"] == true);
    CHECK(std::abs(j["bound"].get<double>() - 2.0 * std::sqrt(2.0)) <= 1e-12);
    CHECK(j["liminf_estimate"].get<double>() <= j["bound"].get<double>());
}

TEST_CASE("ineq subcommand smoke run")
{
    const Outcome a = cli("ineq --which A --samples 6 --seed 3");
    REQUIRE(a.status == 0);
    const json ja = json::parse(a.out);
    CHECK(ja["samples"] == 6);
    CHECK(ja["all_finite"] == true);
    CHECK(std::isfinite(ja["max"].get<double>()));

    const Outcome b = cli("ineq --which A --samples 6 --seed 3 --threads 2");
    REQUIRE(b.status == 0);
    CHECK(json::parse(b.out)["max"] == ja["max"]);
}

TEST_CASE("errors are JSON on stderr with a nonzero exit")
{
    for (const std::string args : {"", "bogus", "moser --a 0.5", "ineq --which Z",
                                   "simulate --config /nonexistent/x.cfg", "invariants"})
    {
        CAPTURE(args);
        const Outcome o = cli(args);
        CHECK(o.status == 2);
        const json e = json::parse(o.err);
        CHECK(e.contains("error"));
        CHECK(e.contains("message"));
    }
    CHECK(json::parse(cli("simulate --config /nonexistent/x.cfg").err)["error"] == "IoError");

    const fs::path bad = write_config("bad.cfg", "grid.nx = 8\nparams.chi = -1\n");
    const Outcome o = cli("simulate --config \"" + bad.string() + "\"");
    CHECK(o.status == 2);
    CHECK(json::parse(o.err)["error"] == "RangeError");
}
