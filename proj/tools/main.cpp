#include "degen_taxis/config.hpp"
#include "degen_taxis/error.hpp"
#include "degen_taxis/experiments.hpp"
#include "degen_taxis/ineq_lab.hpp"
#include "degen_taxis/invariants.hpp"
#include "degen_taxis/io.hpp"
#include "degen_taxis/stepper.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace degen_taxis;

namespace
{

constexpr int exit_checks_failed = 1;
constexpr int exit_error = 2;

void print_error(const std::string& code, const std::string& message)
{
    std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << text;
}

fs::path output_dir(const std::string& flag, const std::string& configured)
{
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("DEGEN_TAXIS_OUT"); env && *env)
        return env;
    return configured;
}

json checks_json(const ViolationReport& report)
{
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}});
    return checks;
}

json report_json(const StudyReport& r)
{
    json runs = json::array();
    for (const auto& s : r.runs)
        runs.push_back({{"label", s.label},
                        {"parameter", s.parameter},
                        {"t_final", s.t_final},
                        {"steps", s.steps},
                        {"rejections", s.rejections},
                        {"stopped_early", s.stopped_early},
                        {"invariants_pass", s.invariants_pass},
                        {"failed_checks", s.failed_checks},
                        {"mass_u_initial", s.mass_u_initial},
                        {"mass_u_final", s.mass_u_final},
                        {"mass_v_initial", s.mass_v_initial},
                        {"sup_v_final", s.sup_v_final}});
    json values = json::object();
    for (const auto& [k, v] : r.values)
        values[k] = v;
    json criteria = json::array();
    for (const auto& c : r.criteria)
        criteria.push_back({{"name", c.name},
                            {"pass", c.pass},
                            {"applicable", c.applicable},
                            {"value", c.value},
                            {"limit", c.limit},
                            {"note", c.note}});
    return {{"study", r.study},      {"pass", r.all_pass()}, {"values", values},
            {"criteria", criteria},  {"runs", runs},         {"artifacts", r.artifacts}};
}

struct SimulateArgs
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 1;
};

int cmd_simulate(const SimulateArgs& a)
{
    RunConfig cfg = a.config.empty() ? parse_config("") : parse_config(read_text(a.config));
    if (a.seed)
        cfg.seed = *a.seed;
    const fs::path dir = output_dir(a.out, cfg.output_dir);
    fs::create_directories(dir);

    PresetOptions po;
    po.grid = cfg.grid();
    po.v_bar = cfg.v_bar;
    po.seed = cfg.seed;
    const Preset shapes = preset(cfg.preset, po);
    const ScalarField u0 = shapes.u0();
    const ScalarField v0 = shapes.v0();

    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = run(u0, v0, cfg.params, cfg.step, cfg.diag);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const SeriesContext ctx = context_of(traj, cfg.params, cfg.step);
    const ViolationReport report = check_invariants(traj.samples, ctx);

    json files = json::array();
    write_series_csv(dir / "series.csv", traj.samples, cfg.diag.p_list, ctx);
    files.push_back("series.csv");
    auto snapshot = [&](const std::string& stem, const std::string& name, const ScalarField& f,
                        double t) {
        write_snapshot(dir / stem, f, SnapshotMeta{t, name, f.min(), f.max()});
        files.push_back(stem + ".pgm");
        files.push_back(stem + ".json");
    };
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    {
        const auto& s = traj.snapshots[k];
        snapshot("u_" + std::to_string(k), "u", s.u, s.t);
        snapshot("v_" + std::to_string(k), "v", s.v, s.t);
    }
    snapshot("u_final", "u", traj.final.u, traj.final.t);
    snapshot("v_final", "v", traj.final.v, traj.final.t);

    const auto& audit = traj.audit;
    json summary{
        {"config", serialize_config(cfg)},
        {"pass", report.all_pass()},
        {"checks", checks_json(report)},
        {"extrema",
         {{"t_final", traj.final.t},
          {"max_sup_u", audit.max_sup_u},
          {"final_sup_v", traj.samples.back().sup_v},
          {"final_min_v", traj.samples.back().min_v},
          {"max_mass_u_residual", audit.max_mass_u_residual},
          {"max_mass_v_residual", audit.max_mass_v_residual},
          {"max_sup_v_increase", audit.max_sup_v_increase},
          {"min_comparison_ratio", audit.min_comparison_ratio}}},
        {"steps",
         {{"accepted", audit.steps},
          {"rejected", audit.rejections},
          {"dt_smallest", audit.dt_smallest},
          {"dt_largest", audit.dt_largest},
          {"dt_mean", audit.dt_mean},
          {"stopped_early", traj.stopped_early}}},
        {"timing", {{"seconds", seconds}}},
        {"files", files},
    };
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << json{{"pass", report.all_pass()}, {"output_dir", dir.string()},
                      {"steps", audit.steps}, {"t_final", traj.final.t}}
                     .dump()
              << "\n";
    return report.all_pass() ? 0 : exit_checks_failed;
}

int cmd_invariants(const std::string& series, double tol_exact, double tol_pde)
{
    const SeriesFile file = read_series_csv(fs::path(series));
    const ViolationReport report = check_invariants(file.samples, file.context, tol_exact, tol_pde);
    std::cout << json{{"series", series},
                      {"samples", file.samples.size()},
                      {"pass", report.all_pass()},
                      {"checks", checks_json(report)}}
                     .dump(2)
              << "\n";
    return report.all_pass() ? 0 : exit_checks_failed;
}

struct IneqArgs
{
    std::string which = "A";
    std::optional<double> p;
    std::optional<double> eta;
    int samples = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<double> p_list;
};

int cmd_ineq(const IneqArgs& a)
{
    SweepOptions o;
    o.kind = parse_ineq_kind(a.which);
    o.samples = a.samples;
    o.master_seed = a.seed;
    o.threads = a.threads;
    if (o.kind == IneqKind::MoserSplit)
    {
        o.p = moser_p_star;
        o.eta = 0.01;
    }
    if (a.p)
        o.p = *a.p;
    if (a.eta)
        o.eta = *a.eta;

    const SweepResult r = run_sweep(o);
    json out{{"which", to_string(o.kind)},
             {"p", o.p},
             {"eta", o.eta},
             {"samples", o.samples},
             {"seed", o.master_seed},
             {"max", r.max_value},
             {"argmax_seed", r.argmax_seed},
             {"all_finite", r.all_finite}};
    if (o.kind == IneqKind::Hessian)
        out["max_second"] = r.max_second;
    bool ok = r.all_finite;
    if (o.kind == IneqKind::MoserSplit && !a.p_list.empty())
    {
        const MoserSplitFit fit = moser_split_slope(o, a.p_list);
        out["p_list"] = fit.p_values;
        out["max_witness"] = fit.max_witness;
        out["slope"] = fit.slope;
        ok = ok && std::isfinite(fit.slope);
    }
    out["pass"] = ok;
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : exit_checks_failed;
}

int cmd_moser(double a, double b, double d, double m0, int kmax)
{
    const MoserResult r = moser_bound_check(a, b, d, m0, kmax);
    std::cout << json{{"a", a},
                      {"b", b},
                      {"d", d},
                      {"m0", m0},
                      {"kmax", kmax},
                      {"liminf_estimate", r.liminf_estimate},
                      {"min_root", r.min_root},
                      {"bound", r.bound},
                      {"log_bound", r.log_bound},
                      {"pass", r.pass}}
                     .dump(2)
              << "\n";
    return r.pass ? 0 : exit_checks_failed;
}

int cmd_experiment(const std::string& name, const std::string& out, int threads,
                   std::uint64_t seed)
{
    PresetOptions po;
    po.seed = seed;
    const Preset p = preset(name, po);
    StudyOptions so;
    so.threads = threads;
    so.output_dir = output_dir(out, "out") / name;
    fs::create_directories(so.output_dir);
    const StudyReport report = run_preset_study(p, so);
    const json j = report_json(report);
    write_text(so.output_dir / "report.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return report.all_pass() ? 0 : exit_checks_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-volume simulator and invariant lab for a doubly degenerate nutrient taxis system"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one trajectory and write series.csv, snapshots and summary.json");
    simulate->add_option("--config", sim.config, "Config file (key = value lines)");
    simulate->add_option("--seed", sim.seed, "Override run.seed");
    simulate->add_option("--out", sim.out, "Output directory (overrides DEGEN_TAXIS_OUT and run.output_dir)");
    simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string series;
    double tol_exact = 1e-10;
    double tol_pde = -1.0;
    auto* invariants = app.add_subcommand("invariants", "Re-check a stored series CSV");
    invariants->add_option("--series", series, "Series CSV written by simulate")->required();
    invariants->add_option("--tol-exact", tol_exact, "Tolerance for exact identities");
    invariants->add_option("--tol-pde", tol_pde, "Tolerance for discretization-limited bounds (negative: default)");

    IneqArgs ia;
    auto* ineq = app.add_subcommand("ineq", "Random-field sweep of a functional inequality");
    ineq->add_option("--which", ia.which, "A | B | hessian | sobolev | moser-split");
    ineq->add_option("--p", ia.p, "Exponent p");
    ineq->add_option("--eta", ia.eta, "Splitting parameter eta");
    ineq->add_option("--samples", ia.samples, "Number of random trials")->check(CLI::PositiveNumber);
    ineq->add_option("--seed", ia.seed, "Master seed");
    ineq->add_option("--threads", ia.threads, "Worker threads")->check(CLI::PositiveNumber);
    ineq->add_option("--p-list", ia.p_list, "moser-split: exponents for the slope fit")->delimiter(',');

    double ma = 1, mb = 1, md = 0, mm0 = 1;
    int kmax = 20;
    auto* moser = app.add_subcommand("moser", "Evaluate the Moser recursion against its closed-form bound");
    moser->add_option("--a", ma, "Growth factor a >= 1");
    moser->add_option("--b", mb, "Source constant b >= 1");
    moser->add_option("--d", md, "Exponent perturbation d >= 0");
    moser->add_option("--m0", mm0, "Initial value M0 > 0");
    moser->add_option("--kmax", kmax, "Number of recursion steps");

    std::string exp_name;
    std::string exp_out;
    int exp_threads = 1;
    std::uint64_t exp_seed = 1;
    auto* experiment = app.add_subcommand("experiment", "Run a preset study");
    experiment->add_option("--name", exp_name, "homogeneous | branching | small_v0 | eps_study | longtime")
        ->required();
    experiment->add_option("--out", exp_out, "Output directory (overrides DEGEN_TAXIS_OUT)");
    experiment->add_option("--threads", exp_threads, "Concurrent sweep members")->check(CLI::PositiveNumber);
    experiment->add_option("--seed", exp_seed, "Seed for randomized initial data");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        print_error("UsageError", e.what());
        return exit_error;
    }

    try
    {
        if (*simulate)
            return cmd_simulate(sim);
        if (*invariants)
            return cmd_invariants(series, tol_exact, tol_pde);
        if (*ineq)
            return cmd_ineq(ia);
        if (*moser)
            return cmd_moser(ma, mb, md, mm0, kmax);
        if (*experiment)
            return cmd_experiment(exp_name, exp_out, exp_threads, exp_seed);
    }
    catch (const Error& e)
    {
        print_error(std::string(to_string(e.code())), e.what());
        return exit_error;
    }
    catch (const std::exception& e)
    {
        print_error("InternalError", e.what());
        return exit_error;
    }
    return exit_error;
}
