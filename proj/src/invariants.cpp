#include "degen_taxis/invariants.hpp"

#include "degen_taxis/error.hpp"

#include <algorithm>
#include <cmath>

namespace degen_taxis
{

SeriesContext context_of(const Trajectory& traj, const Params& p, const StepControl& c)
{
    const GridSpec& g = traj.final.u.grid();
    SeriesContext ctx;
    ctx.params = p;
    ctx.area = g.area();
    ctx.h = g.h_min();
    ctx.dt_mean = traj.audit.dt_mean;
    ctx.u_ceiling = c.u_ceiling;
    return ctx;
}

bool ViolationReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const InvariantCheck& ViolationReport::at(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return c;
    throw Error(ErrorCode::ConfigError, "no invariant check named '" + name + "'");
}

double default_tol_pde(const SeriesContext& ctx)
{
    return 50.0 * (ctx.dt_mean + ctx.h * ctx.h);
}

ViolationReport check_invariants(const std::vector<DiagRecord>& samples, const SeriesContext& ctx,
                                 double tol_exact, double tol_pde)
{
    if (samples.size() < 2)
        throw Error(ErrorCode::ConfigError, "invariant checks need at least two samples");
    if (tol_pde < 0.0)
        tol_pde = default_tol_pde(ctx);

    const DiagRecord& first = samples.front();
    const double ell = ctx.params.ell;
    ViolationReport rep;
    auto add = [&](std::string name, bool pass, double value, double limit) {
        rep.checks.push_back({std::move(name), pass, value, limit});
    };

    bool finite = true;
    for (const auto& r : samples)
        for (double x : record_row(r))
            finite = finite && std::isfinite(x);
    add("finite", finite, finite ? 0.0 : 1.0, 0.0);

    // (a) int u never drops below its initial value.
    double worst_drop = 0.0;
    for (const auto& r : samples)
        worst_drop = std::min(worst_drop, (r.mass_u - first.mass_u) / first.mass_u);
    add("mass_u_lower", worst_drop >= -tol_exact, worst_drop, -tol_exact);

    // (b) int u <= int u0 + ell int v0.
    const double upper = (first.mass_u + ell * first.mass_v) * (1.0 + tol_exact);
    double max_mass_u = 0.0;
    for (const auto& r : samples)
        max_mass_u = std::max(max_mass_u, r.mass_u);
    add("mass_u_upper", max_mass_u <= upper, max_mass_u, upper);

    // (c) int v and ||v||_inf nonincreasing.
    double worst_mv = -1.0, worst_sv = -1.0;
    for (std::size_t k = 1; k < samples.size(); ++k)
    {
        worst_mv = std::max(worst_mv, (samples[k].mass_v - samples[k - 1].mass_v) / first.mass_v);
        worst_sv = std::max(worst_sv, (samples[k].sup_v - samples[k - 1].sup_v) / first.sup_v);
    }
    add("mass_v_nonincreasing", worst_mv <= tol_exact, worst_mv, tol_exact);
    add("sup_v_nonincreasing", worst_sv <= tol_exact, worst_sv, tol_exact);

    // (d) int_0^t int uv <= int v0.
    const double uv_limit = first.mass_v * (1.0 + tol_exact);
    double max_cum_uv = 0.0;
    for (const auto& r : samples)
        max_cum_uv = std::max(max_cum_uv, r.cum_uv);
    add("cum_uv_bound", max_cum_uv <= uv_limit, max_cum_uv, uv_limit);

    // (e) int_0^t int v|grad v|^2 <= |Omega| ||v0||^3 / 3.
    const double v3_limit =
        ctx.area * first.sup_v * first.sup_v * first.sup_v / 3.0 * (1.0 + tol_pde);
    double max_cum_vg = 0.0;
    for (const auto& r : samples)
        max_cum_vg = std::max(max_cum_vg, r.cum_vgradv2);
    add("cum_v_gradv2_bound", max_cum_vg <= v3_limit, max_cum_vg, v3_limit);

    // (f) Lyapunov decay, and the decrease pays for the dissipation.
    const double lyap_scale = std::max(1.0, std::abs(first.lyap));
    double worst_rate = -1e300;
    for (std::size_t k = 1; k < samples.size(); ++k)
    {
        const double dt = samples[k].t - samples[k - 1].t;
        if (dt > 0.0)
            worst_rate = std::max(worst_rate, (samples[k].lyap - samples[k - 1].lyap) / dt);
    }
    add("lyap_nonincreasing", worst_rate <= tol_pde * lyap_scale, worst_rate, tol_pde * lyap_scale);

    double worst_gap = 1e300;
    for (const auto& r : samples)
    {
        const double drop = first.lyap - r.lyap;
        const double paid = r.cum_diss_u + ell * r.cum_mass_v;
        worst_gap = std::min(worst_gap, drop - paid);
    }
    add("lyap_dissipation", worst_gap >= -tol_pde * lyap_scale, worst_gap, -tol_pde * lyap_scale);

    // (g) q4 stays within 10x of its early-run level.
    const std::size_t early = std::max<std::size_t>(1, samples.size() / 10);
    double early_q4 = first.q4;
    for (std::size_t k = 0; k < early; ++k)
        early_q4 = std::max(early_q4, samples[k].q4);
    double max_q4 = 0.0;
    for (const auto& r : samples)
        max_q4 = std::max(max_q4, r.q4);
    const double q4_limit = 10.0 * early_q4;
    add("q4_bounded", max_q4 <= q4_limit, max_q4, q4_limit);

    // (h) min v >= min v0 exp(-U t)(1 - 10(dt + h^2)).
    double max_u = 0.0;
    for (const auto& r : samples)
        max_u = std::max(max_u, r.sup_u);
    const double slack = 1.0 - 10.0 * (ctx.dt_mean + ctx.h * ctx.h);
    double worst_ratio = 1e300;
    for (const auto& r : samples)
    {
        const double bound = first.min_v * std::exp(-max_u * r.t) * slack;
        if (bound > 0.0)
            worst_ratio = std::min(worst_ratio, r.min_v / bound);
    }
    add("min_v_comparison", worst_ratio >= 1.0, worst_ratio, 1.0);

    add("sup_u_ceiling", max_u <= ctx.u_ceiling, max_u, ctx.u_ceiling);
    return rep;
}

} // namespace degen_taxis
