#include "degen_taxis/experiments.hpp"

#include "degen_taxis/error.hpp"
#include "degen_taxis/ineq_lab.hpp"
#include "degen_taxis/io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace degen_taxis
{

namespace
{

constexpr double pi = std::numbers::pi;

FieldGenerator constant(double value)
{
    return [value](const GridSpec& g) { return ScalarField(g, value); };
}

struct Member
{
    Trajectory traj;
    ScalarField u_initial;
    ViolationReport report;
};

Member run_member(const Preset& p)
{
    const ScalarField u0 = p.u0();
    const ScalarField v0 = p.v0();
    Trajectory traj = run(u0, v0, p.params, p.step, p.diag);
    ViolationReport report = check_invariants(traj.samples, context_of(traj, p.params, p.step));
    return Member{std::move(traj), regularize_initial(u0, p.params.eps), std::move(report)};
}

RunSummary summarize(const std::string& label, double parameter, const Member& m)
{
    RunSummary s;
    s.label = label;
    s.parameter = parameter;
    s.t_final = m.traj.final.t;
    s.steps = m.traj.audit.steps;
    s.rejections = m.traj.audit.rejections;
    s.stopped_early = m.traj.stopped_early;
    s.invariants_pass = m.report.all_pass();
    for (const auto& c : m.report.checks)
        if (!c.pass)
            s.failed_checks.push_back(c.name);
    s.mass_u_initial = m.traj.samples.front().mass_u;
    s.mass_u_final = m.traj.samples.back().mass_u;
    s.mass_v_initial = m.traj.samples.front().mass_v;
    s.sup_v_final = m.traj.samples.back().sup_v;
    return s;
}

Criterion invariants_criterion(const std::vector<RunSummary>& runs)
{
    Criterion c{"invariants", true, 0.0, 0.0, ""};
    for (const auto& r : runs)
    {
        if (r.invariants_pass)
            continue;
        c.pass = false;
        c.value += 1.0;
        c.note += r.label + ":";
        for (const auto& name : r.failed_checks)
            c.note += " " + name;
        c.note += "; ";
    }
    return c;
}

void emit(StudyReport& report, const StudyOptions& options, const std::string& label,
          const Preset& p, const Member& m)
{
    if (options.output_dir.empty())
        return;
    const auto dir = options.output_dir / label;
    std::filesystem::create_directories(dir);
    write_series_csv(dir / "series.csv", m.traj.samples, p.diag.p_list,
                     context_of(m.traj, p.params, p.step));
    report.artifacts.push_back((dir / "series.csv").string());
    for (const auto& [name, field] :
         {std::pair<std::string, const ScalarField*>{"u", &m.traj.final.u},
          std::pair<std::string, const ScalarField*>{"v", &m.traj.final.v}})
    {
        const auto stem = dir / (name + "_final");
        write_snapshot(stem, *field, SnapshotMeta{m.traj.final.t, name, field->min(), field->max()});
        report.artifacts.push_back(stem.string() + ".pgm");
        report.artifacts.push_back(stem.string() + ".json");
    }
}

std::string label_of(const std::string& key, std::size_t k)
{
    return key + "_" + std::to_string(k);
}

} // namespace

bool StudyReport::all_pass() const
{
    return std::all_of(criteria.begin(), criteria.end(),
                       [](const Criterion& c) { return c.pass || !c.applicable; });
}

double StudyReport::value(const std::string& name) const
{
    for (const auto& [key, v] : values)
        if (key == name)
            return v;
    throw Error(ErrorCode::ConfigError, "report has no value '" + name + "'");
}

const Criterion& StudyReport::criterion(const std::string& name) const
{
    for (const auto& c : criteria)
        if (c.name == name)
            return c;
    throw Error(ErrorCode::ConfigError, "report has no criterion '" + name + "'");
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"homogeneous", "branching", "small_v0",
                                                "eps_study", "longtime"};
    return names;
}

ScalarField gaussian_inoculum(const GridSpec& grid, double mass)
{
    const double w = 0.05 * grid.lx();
    const double xc = 0.5 * grid.lx(), yc = 0.5 * grid.ly();
    ScalarField f = ScalarField::from_function(grid, [&](double x, double y) {
        const double r2 = (x - xc) * (x - xc) + (y - yc) * (y - yc);
        return std::exp(-r2 / (2.0 * w * w));
    });
    return (mass / integrate(f)) * f;
}

Preset preset(const std::string& name, const PresetOptions& options)
{
    Preset p;
    p.name = name;
    if (name == "homogeneous")
    {
        p.grid = GridSpec(32, 32, 1.0, 1.0);
        p.params = Params{1.0, 0.0, 0.0};
        p.step.t_end = 1.0;
        p.make_u0 = constant(1.0);
        p.make_v0 = constant(1.0);
    }
    else if (name == "branching")
    {
        p.grid = GridSpec(128, 128, 1.0, 1.0);
        p.params = Params{2.0, 1.0, 0.01};
        p.step.t_end = 1.0;
        p.step.snapshot_times = {0.25, 0.5, 0.75, 1.0};
        p.make_u0 = [](const GridSpec& g) { return gaussian_inoculum(g, 0.1); };
        p.make_v0 = constant(1.0);
    }
    else if (name == "small_v0")
    {
        if (!(options.v_bar > 0.0))
            throw Error(ErrorCode::RangeError, "small_v0 needs v_bar > 0 (v0 must be positive)");
        p.grid = GridSpec(32, 32, 1.0, 1.0);
        p.params = Params{1.0, 1.0, 0.01};
        p.step.t_end = 100.0;
        p.make_u0 = [](const GridSpec& g) {
            return ScalarField::from_function(
                g, [&](double x, double) { return 1.0 + 0.5 * std::cos(pi * x / g.lx()); });
        };
        p.make_v0 = constant(options.v_bar);
        p.v0_bars = {0.04, 0.02, 0.01};
    }
    else if (name == "eps_study")
    {
        p.grid = GridSpec(64, 64, 1.0, 1.0);
        p.eps_list = {0.1, 0.05, 0.025, 0.0125};
        p.params = Params{1.0, 1.0, p.eps_list.front()};
        p.step.t_end = 1.0;
        p.make_u0 = [](const GridSpec& g) {
            return ScalarField::from_function(g, [&](double x, double y) {
                return 1.0 + std::cos(pi * x / g.lx()) * std::cos(pi * y / g.ly());
            });
        };
        p.make_v0 = constant(1.0);
    }
    else if (name == "longtime")
    {
        p.grid = GridSpec(32, 32, 1.0, 1.0);
        p.params = Params{1.0, 1.0, 0.01};
        p.step.t_end = 50.0;
        p.v_threshold = 1e-3;
        const std::uint64_t seed = options.seed;
        p.make_u0 = [seed](const GridSpec& g) {
            RandomFieldSpec spec;
            spec.grid = g;
            spec.modes = 4;
            spec.amplitude = 1.0;
            ScalarField r = random_raw_field(spec, seed);
            const double scale = std::max(std::abs(r.min()), std::abs(r.max()));
            if (scale > 0.0)
                r = (1.0 / scale) * r;
            return ScalarField(g, 1.0) + 0.1 * r;
        };
        p.make_v0 = constant(1.0);
    }
    else
    {
        throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
    }
    if (options.grid)
        p.grid = *options.grid;
    return p;
}

double field_variance(const ScalarField& f)
{
    const double area = f.grid().area();
    const double mean = integrate(f) / area;
    const ScalarField d = f - ScalarField(f.grid(), mean);
    return integrate(d * d) / area;
}

double space_time_l1(const std::vector<Snapshot>& a, const std::vector<Snapshot>& b)
{
    if (a.size() != b.size() || a.empty())
        throw Error(ErrorCode::ConfigError, "snapshot sequences differ in length or are empty");
    std::vector<double> slice(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        if (std::abs(a[k].t - b[k].t) > 1e-12 * std::max(1.0, std::abs(a[k].t)))
            throw Error(ErrorCode::ConfigError, "snapshot times differ");
        require_same_grid(a[k].u, b[k].u);
        ScalarField d = a[k].u - b[k].u;
        for (double& x : d.values())
            x = std::abs(x);
        slice[k] = integrate(d);
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < a.size(); ++k)
        total += 0.5 * (a[k + 1].t - a[k].t) * (slice[k] + slice[k + 1]);
    return total;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::RangeError, "slope fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        mx += x[k] / n;
        my += y[k] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    if (sxx == 0.0)
        throw Error(ErrorCode::RangeError, "slope fit needs distinct abscissae");
    return sxy / sxx;
}

Criterion mass_window(double mass_u_final, double mass_u0, double mass_v0, double ell, double tol)
{
    const double slack = tol * std::max(1.0, std::abs(mass_u0));
    const double lo = mass_u0 - slack;
    const double hi = mass_u0 + ell * mass_v0 + slack;
    Criterion c{"mass_window", mass_u_final >= lo && mass_u_final <= hi, mass_u_final, hi, ""};
    c.note = "window [" + format_double(mass_u0) + ", " + format_double(mass_u0 + ell * mass_v0) +
             "]";
    return c;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f)
{
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t k) {
        try
        {
            f(k);
        }
        catch (...)
        {
            errors[k] = std::current_exception();
        }
    };
    if (workers <= 1)
    {
        for (std::size_t k = 0; k < n; ++k)
            guarded(k);
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < n; k += workers)
                    guarded(k);
            });
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

StudyReport run_eps_study(const std::vector<double>& eps_list, const Preset& base,
                          const StudyOptions& options)
{
    if (eps_list.size() < 3)
        throw Error(ErrorCode::ConfigError, "eps study needs at least three regularizations");
    for (std::size_t k = 0; k < eps_list.size(); ++k)
    {
        if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0))
            throw Error(ErrorCode::ConfigError, "eps study values must lie in (0,1)");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            throw Error(ErrorCode::ConfigError, "eps study values must be strictly decreasing");
    }

    Preset shared = base;
    const double t_end = shared.step.t_end;
    shared.step.snapshot_times.clear();
    for (int k = 0; k <= 20; ++k)
        shared.step.snapshot_times.push_back(t_end * k / 20.0);
    shared.step.stop_below_sup_v.reset();

    std::vector<std::optional<Member>> members(eps_list.size());
    parallel_for(eps_list.size(), options.threads, [&](std::size_t k) {
        Preset p = shared;
        p.params.eps = eps_list[k];
        members[k] = run_member(p);
    });

    StudyReport report;
    report.study = "eps_study";
    for (std::size_t k = 0; k < eps_list.size(); ++k)
    {
        const std::string label = label_of("eps", k);
        report.runs.push_back(summarize(label, eps_list[k], *members[k]));
        Preset p = shared;
        p.params.eps = eps_list[k];
        emit(report, options, label, p, *members[k]);
    }

    const std::size_t n = eps_list.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] =
                space_time_l1(members[i]->traj.snapshots, members[j]->traj.snapshots);

    Criterion decreasing{"D_strictly_decreasing", true, 0.0, 0.0, ""};
    for (std::size_t k = 0; k + 1 < n; ++k)
    {
        report.values.emplace_back("D_" + std::to_string(k), dist[k][k + 1]);
        if (k > 0 && !(dist[k][k + 1] < dist[k - 1][k]))
            decreasing.pass = false;
        if (k > 0)
            decreasing.value = std::max(decreasing.value, dist[k][k + 1] / dist[k - 1][k]);
    }
    decreasing.limit = 1.0;
    decreasing.note = "value = max ratio D_k / D_{k-1}";

    double worst_triangle = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                worst_triangle = std::max(worst_triangle, dist[i][k] - dist[i][j] - dist[j][k]);
    report.values.emplace_back("triangle_excess", worst_triangle);

    report.criteria.push_back(decreasing);
    report.criteria.push_back(
        Criterion{"triangle_inequality", worst_triangle <= 1e-10, worst_triangle, 1e-10, ""});
    report.criteria.push_back(invariants_criterion(report.runs));
    return report;
}

StudyReport run_longtime(const Preset& base, double v_threshold, const StudyOptions& options)
{
    const ScalarField v0 = base.v0();
    if (!(v_threshold > 0.0 && v_threshold < v0.max()))
        throw Error(ErrorCode::RangeError, "v_threshold must lie in (0, ||v0||_inf)");

    Preset first = base;
    first.step.stop_below_sup_v = v_threshold;
    first.step.snapshot_times.clear();
    const Member crossing = run_member(first);

    StudyReport report;
    report.study = "longtime";
    report.runs.push_back(summarize("to_threshold", v_threshold, crossing));
    emit(report, options, "to_threshold", first, crossing);

    const auto& samples = crossing.traj.samples;
    const double t_star = crossing.traj.final.t;
    const double mass_u0 = samples.front().mass_u;
    const double mass_v0 = samples.front().mass_v;
    const double mass_u_final = samples.back().mass_u;
    report.values.emplace_back("v_threshold", v_threshold);
    report.values.emplace_back("T_star", t_star);
    report.values.emplace_back("mass_u_initial", mass_u0);
    report.values.emplace_back("mass_u_final", mass_u_final);
    report.values.emplace_back("sup_v_final", samples.back().sup_v);

    Criterion reached{"threshold_reached", crossing.traj.stopped_early, samples.back().sup_v,
                      v_threshold, ""};
    if (!reached.pass)
        reached.note = "ThresholdNotReached: t_end hit first";
    report.criteria.push_back(reached);
    report.criteria.push_back(mass_window(mass_u_final, mass_u0, mass_v0, base.params.ell));

    Criterion sup_v_dec{"sup_v_strictly_decreasing", true, 0.0, 0.0, ""};
    Criterion mass_mono{base.params.ell > 0.0 ? "mass_u_nondecreasing" : "mass_u_constant", true,
                        0.0, 1e-10, ""};
    for (std::size_t k = 1; k < samples.size(); ++k)
    {
        if (!(samples[k].sup_v < samples[k - 1].sup_v))
        {
            sup_v_dec.pass = false;
            sup_v_dec.value = std::max(sup_v_dec.value, samples[k].sup_v - samples[k - 1].sup_v);
        }
        const double change = (samples[k].mass_u - samples[k - 1].mass_u) / mass_u0;
        const double bad = base.params.ell > 0.0 ? -change : std::abs(change);
        mass_mono.value = std::max(mass_mono.value, bad);
    }
    mass_mono.pass = mass_mono.value <= mass_mono.limit;
    report.criteria.push_back(sup_v_dec);
    report.criteria.push_back(mass_mono);

    Preset second = base;
    second.step.stop_below_sup_v.reset();
    second.step.t_end = t_star;
    second.step.snapshot_times = {0.5 * t_star, t_star};
    const Member halves = run_member(second);
    report.runs.push_back(summarize("to_T_star", t_star, halves));
    emit(report, options, "to_T_star", second, halves);
    if (halves.traj.snapshots.size() != 2)
        throw Error(ErrorCode::ConfigError, "longtime rerun did not record both snapshots");
    const ScalarField& u_half = halves.traj.snapshots[0].u;
    const ScalarField& u_end = halves.traj.snapshots[1].u;
    const double late = dual_distance(u_end, u_half, base.diag);
    const double early = dual_distance(u_half, halves.u_initial, base.diag);
    report.values.emplace_back("dual_T_Thalf", late);
    report.values.emplace_back("dual_Thalf_0", early);
    report.values.emplace_back("variance_u_initial", field_variance(halves.u_initial));
    report.values.emplace_back("variance_u_final", field_variance(crossing.traj.final.u));
    Criterion settle{"stabilization", late < early, late, early, ""};
    if (late == 0.0 && early == 0.0)
    {
        settle.pass = true;
        settle.note = "u stationary: both distances vanish";
    }
    report.criteria.push_back(settle);
    report.criteria.push_back(invariants_criterion(report.runs));
    return report;
}

StudyReport run_v0_scaling(const std::vector<double>& v0_bars, const Preset& base,
                           const StudyOptions& options)
{
    if (v0_bars.size() < 3)
        throw Error(ErrorCode::ConfigError, "v0 scaling needs at least three nutrient levels");
    for (std::size_t k = 0; k < v0_bars.size(); ++k)
    {
        if (!(v0_bars[k] > 0.0))
            throw Error(ErrorCode::RangeError, "v0 levels must be > 0 (v0 must be positive)");
        if (k > 0 && !(v0_bars[k] < v0_bars[k - 1]))
            throw Error(ErrorCode::ConfigError, "v0 levels must be strictly decreasing");
    }

    std::vector<std::optional<Member>> members(v0_bars.size());
    std::vector<Preset> configs(v0_bars.size(), base);
    for (std::size_t k = 0; k < v0_bars.size(); ++k)
    {
        configs[k].make_v0 = constant(v0_bars[k]);
        configs[k].step.stop_below_sup_v = base.stop_factor * v0_bars[k];
        configs[k].step.snapshot_times.clear();
    }
    parallel_for(v0_bars.size(), options.threads,
                 [&](std::size_t k) { members[k] = run_member(configs[k]); });

    StudyReport report;
    report.study = "v0_scaling";
    report.values.emplace_back("stop_factor", base.stop_factor);
    report.values.emplace_back("retention_threshold", base.retention);

    std::vector<double> log_mass, log_delta;
    Criterion reached{"threshold_reached", true, 0.0, 0.0, ""};
    Criterion monotone{"delta_decreasing", true, 0.0, 1.0, "value = max ratio delta_k / delta_{k-1}"};
    double previous = 0.0;
    bool positive = true;
    for (std::size_t k = 0; k < v0_bars.size(); ++k)
    {
        const Member& m = *members[k];
        const std::string label = label_of("vbar", k);
        report.runs.push_back(summarize(label, v0_bars[k], m));
        emit(report, options, label, configs[k], m);
        if (!m.traj.stopped_early)
        {
            reached.pass = false;
            reached.note += label + " hit t_end; ";
        }
        const double delta = dual_distance(m.traj.final.u, m.u_initial, base.diag);
        const double mass_v0 = m.traj.samples.front().mass_v;
        report.values.emplace_back("delta_" + std::to_string(k), delta);
        report.values.emplace_back("mass_v0_" + std::to_string(k), mass_v0);
        if (k > 0)
        {
            monotone.value = std::max(monotone.value, delta / previous);
            if (!(delta < previous))
                monotone.pass = false;
        }
        previous = delta;
        positive = positive && delta > 0.0;
        if (delta > 0.0)
        {
            log_mass.push_back(std::log(mass_v0));
            log_delta.push_back(std::log(delta));
        }
    }
    report.criteria.push_back(reached);
    report.criteria.push_back(monotone);

    Criterion slope{"lambda_positive", false, 0.0, 0.0, ""};
    if (positive)
    {
        slope.value = fit_slope(log_mass, log_delta);
        slope.pass = slope.value > 0.0;
        report.values.emplace_back("lambda_hat", slope.value);
    }
    else
    {
        slope.note = "delta vanished; exponent undefined";
    }
    report.criteria.push_back(slope);

    const Member& smallest = *members.back();
    const double var0 = field_variance(smallest.u_initial);
    const double var_t = field_variance(smallest.traj.final.u);
    report.values.emplace_back("variance_u_initial", var0);
    report.values.emplace_back("variance_u_final", var_t);
    Criterion retention{"variance_retention", false, 0.0, base.retention, ""};
    if (smallest.u_initial.min() < smallest.u_initial.max())
    {
        retention.value = var_t / var0;
        retention.pass = retention.value >= base.retention;
    }
    else
    {
        retention.applicable = false;
        retention.note = "not applicable: constant u0";
    }
    report.criteria.push_back(retention);
    report.criteria.push_back(invariants_criterion(report.runs));
    return report;
}

StudyReport run_preset_study(const Preset& p, const StudyOptions& options)
{
    if (p.name == "eps_study")
        return run_eps_study(p.eps_list, p, options);
    if (p.name == "longtime")
        return run_longtime(p, p.v_threshold, options);
    if (p.name == "small_v0")
        return run_v0_scaling(p.v0_bars, p, options);

    const Member m = run_member(p);
    StudyReport report;
    report.study = p.name;
    report.runs.push_back(summarize(p.name, 0.0, m));
    emit(report, options, p.name, p, m);
    for (const auto& c : m.report.checks)
        report.criteria.push_back(Criterion{c.name, c.pass, c.value, c.limit, ""});
    report.values.emplace_back("t_final", m.traj.final.t);
    report.values.emplace_back("sup_u_max", m.traj.audit.max_sup_u);
    report.values.emplace_back("max_mass_u_residual", m.traj.audit.max_mass_u_residual);
    report.values.emplace_back("max_mass_v_residual", m.traj.audit.max_mass_v_residual);
    return report;
}

} // namespace degen_taxis
