#include "degen_taxis/stepper.hpp"

#include "degen_taxis/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace degen_taxis
{

void StepControl::validate() const
{
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw Error(ErrorCode::RangeError, "step.cfl_safety must lie in (0,1]");
    if (!(dt_min > 0.0) || !(dt_max > 0.0) || dt_min > dt_max)
        throw Error(ErrorCode::RangeError, "step.dt_min/dt_max must satisfy 0 < dt_min <= dt_max");
    if (!(t_end > 0.0))
        throw Error(ErrorCode::RangeError, "step.t_end must be > 0");
    if (max_rejections_per_step < 0)
        throw Error(ErrorCode::RangeError, "step.max_rejections must be >= 0");
    if (fixed_dt && !(*fixed_dt > 0.0))
        throw Error(ErrorCode::RangeError, "step.fixed_dt must be > 0");
    if (!(u_ceiling > 0.0))
        throw Error(ErrorCode::RangeError, "step.u_ceiling must be > 0");
    for (std::size_t k = 0; k < snapshot_times.size(); ++k)
        if (snapshot_times[k] < 0.0 || (k > 0 && snapshot_times[k] <= snapshot_times[k - 1]))
            throw Error(ErrorCode::RangeError, "snapshot times must be increasing and >= 0");
}

double stable_dt(const State& s, const Params& p, const StepControl& c)
{
    const ScalarField& u = s.u;
    const ScalarField& v = s.v;
    const GridSpec& g = u.grid();

    // Nothing moves when v vanishes identically.
    if (v.max() == 0.0 && v.min() == 0.0)
        return c.dt_max;

    const double h = g.h_min();
    double max_uv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        max_uv = std::max(max_uv, u[k] * v[k]);
    const double max_u = u.max();

    const double inf = std::numeric_limits<double>::infinity();
    double bound = h * h / 4.0;
    if (max_uv > 0.0)
        bound = std::min(bound, h * h / (4.0 * max_uv));
    if (max_u > 0.0)
        bound = std::min(bound, 1.0 / max_u);

    double adv = 0.0;
    auto face = [&](std::size_t a, std::size_t b, double ih) {
        const double um = 0.5 * (u[a] + u[b]);
        const double vm = 0.5 * (v[a] + v[b]);
        const double gv = std::abs(v[b] - v[a]) * ih;
        adv = std::max(adv, um * um * vm * gv / std::max(p.eps, um));
    };
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            face(g.index(i - 1, j), g.index(i, j), ihx);
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            face(g.index(i, j - 1), g.index(i, j), ihy);
    const double adv_bound = adv > 0.0 ? h / (p.chi * adv) : inf;
    bound = std::min(bound, adv_bound);

    return std::clamp(c.cfl_safety * bound, c.dt_min, c.dt_max);
}

State step_euler(const State& s, const Params& p, double dt)
{
    const ScalarField du = rhs_u(s.u, s.v, p);
    const ScalarField dv = rhs_v(s.u, s.v);
    State out{s.u, s.v, s.t + dt};
    for (std::size_t k = 0; k < out.u.size(); ++k)
    {
        out.u[k] += dt * du[k];
        out.v[k] += dt * dv[k];
    }
    return out;
}

namespace
{

void accumulate(DiagRecord& cum, const StepRates& r, double dt)
{
    cum.cum_uv += dt * r.r_uv;
    cum.cum_diss_u += dt * r.diss_u;
    cum.cum_diss_v += dt * r.diss_v;
    cum.cum_q4 += dt * r.q4;
    cum.cum_q6 += dt * r.q6;
    cum.cum_mass_v += dt * r.mass_v;
    cum.cum_vgradv2 += dt * r.v_gradv2;
}

DiagRecord sample(const State& s, const Params& p, const DiagConfig& d, const DiagRecord& cum)
{
    DiagRecord rec = functionals(s, p, d);
    rec.cum_uv = cum.cum_uv;
    rec.cum_diss_u = cum.cum_diss_u;
    rec.cum_diss_v = cum.cum_diss_v;
    rec.cum_q4 = cum.cum_q4;
    rec.cum_q6 = cum.cum_q6;
    rec.cum_mass_v = cum.cum_mass_v;
    rec.cum_vgradv2 = cum.cum_vgradv2;
    return rec;
}

bool finite_state(const State& s)
{
    return s.u.all_finite() && s.v.all_finite();
}

} // namespace

Trajectory run(const ScalarField& u0, const ScalarField& v0, const Params& p,
               const StepControl& c, const DiagConfig& d)
{
    p.validate();
    c.validate();
    d.validate();
    require_same_grid(u0, v0);
    if (!(v0.min() > 0.0))
        throw Error(ErrorCode::NonPositiveField, "initial nutrient must be strictly positive");

    State s{regularize_initial(u0, p.eps), v0, 0.0};
    if (!(s.u.min() > 0.0))
        throw Error(ErrorCode::NonPositiveField,
                    "regularized initial density must be positive (use eps > 0)");
    if (!finite_state(s))
        throw Error(ErrorCode::NonFiniteState, "initial data contain NaN or Inf");

    const double h = u0.grid().h_min();
    const double min_v0 = v0.min();
    const double t_end = c.t_end;
    const double t_tol = 1e-13 * t_end;

    std::vector<DiagRecord> samples;
    std::vector<double> snap_times;
    std::vector<Snapshot> snaps;
    StepAudit audit;
    bool stopped_early = false;
    DiagRecord cum;
    StepRates rates = step_rates(s.u, s.v, d.positivity_floor);
    audit.max_sup_u = rates.sup_u;
    audit.ceiling_exceeded = rates.sup_u > c.u_ceiling;
    samples.push_back(sample(s, p, d, cum));

    std::size_t next_snap = 0;
    auto take_snapshots = [&] {
        while (next_snap < c.snapshot_times.size() &&
               std::abs(c.snapshot_times[next_snap] - s.t) <= t_tol)
        {
            snaps.push_back({s.t, s.u, s.v});
            snap_times.push_back(s.t);
            ++next_snap;
        }
        while (next_snap < c.snapshot_times.size() && c.snapshot_times[next_snap] < s.t - t_tol)
            ++next_snap;
    };
    take_snapshots();

    double dt_sum = 0.0;
    double running_max_u = rates.sup_u;
    long since_sample = 0;
    bool sampled_last = true;

    while (s.t < t_end - t_tol)
    {
        double dt = c.fixed_dt ? *c.fixed_dt : stable_dt(s, p, c);
        double horizon = t_end;
        if (next_snap < c.snapshot_times.size())
            horizon = std::min(horizon, c.snapshot_times[next_snap]);
        bool landing = false;
        if (s.t + dt >= horizon - t_tol)
        {
            dt = horizon - s.t;
            landing = true;
        }

        State next = step_euler(s, p, dt);
        for (int attempt = 0;; ++attempt)
        {
            if (attempt > 0)
                next = step_euler(s, p, dt);
            if (!finite_state(next))
                throw Error(ErrorCode::NonFiniteState,
                            "NaN/Inf after step at t = " + std::to_string(s.t));
            if (next.u.min() > 0.0 && next.v.min() > 0.0)
                break;
            if (c.fixed_dt)
                throw Error(ErrorCode::StepCollapse,
                            "fixed step lost positivity at t = " + std::to_string(s.t));
            ++audit.rejections;
            dt *= 0.5;
            landing = false;
            if (dt < c.dt_min || attempt + 1 > c.max_rejections_per_step)
                throw Error(ErrorCode::StepCollapse,
                            "step size collapsed below dt_min at t = " + std::to_string(s.t));
        }
        if (landing)
            next.t = horizon;

        const StepRates next_rates = step_rates(next.u, next.v, d.positivity_floor);

        const double du = next_rates.mass_u - rates.mass_u - dt * p.ell * rates.r_uv;
        const double dv = next_rates.mass_v - rates.mass_v + dt * rates.r_uv;
        audit.max_mass_u_residual = std::max(audit.max_mass_u_residual, std::abs(du) / rates.mass_u);
        audit.max_mass_v_residual = std::max(audit.max_mass_v_residual, std::abs(dv) / rates.mass_v);
        audit.max_sup_v_increase =
            std::max(audit.max_sup_v_increase, (next_rates.sup_v - rates.sup_v) / rates.sup_v);
        audit.max_mass_v_increase =
            std::max(audit.max_mass_v_increase, (next_rates.mass_v - rates.mass_v) / rates.mass_v);

        accumulate(cum, rates, dt);
        dt_sum += dt;
        audit.dt_smallest = audit.steps == 0 ? dt : std::min(audit.dt_smallest, dt);
        audit.dt_largest = std::max(audit.dt_largest, dt);
        ++audit.steps;

        s = std::move(next);
        rates = next_rates;
        running_max_u = std::max(running_max_u, rates.sup_u);
        audit.max_sup_u = running_max_u;
        if (rates.sup_u > c.u_ceiling)
            audit.ceiling_exceeded = true;
        const double comparison = min_v0 * std::exp(-running_max_u * s.t) *
                                  (1.0 - 10.0 * (audit.dt_largest + h * h));
        if (comparison > 0.0)
            audit.min_comparison_ratio = std::min(audit.min_comparison_ratio, rates.min_v / comparison);

        take_snapshots();

        const bool stop = c.stop_below_sup_v && rates.sup_v < *c.stop_below_sup_v;
        sampled_last = false;
        if (++since_sample >= d.stride || stop)
        {
            samples.push_back(sample(s, p, d, cum));
            since_sample = 0;
            sampled_last = true;
        }
        if (stop)
        {
            stopped_early = true;
            break;
        }
    }

    if (!sampled_last)
        samples.push_back(sample(s, p, d, cum));
    audit.dt_mean = audit.steps > 0 ? dt_sum / audit.steps : 0.0;
    return Trajectory{std::move(samples), std::move(snap_times), std::move(snaps), std::move(s),
                      audit, stopped_early};
}

} // namespace degen_taxis
