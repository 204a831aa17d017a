#pragma once

#include "degen_taxis/diagnostics.hpp"
#include "degen_taxis/model.hpp"

#include <optional>
#include <vector>

namespace degen_taxis
{

struct StepControl
{
    double cfl_safety = 0.4;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double t_end = 1.0;
    int max_rejections_per_step = 40;
    /// Fixed step (no adaptation, no rejection); for convergence studies only.
    std::optional<double> fixed_dt;
    /// ||u||_inf above this counts as blow-up in the run audit.
    double u_ceiling = 1e6;
    /// Stop as soon as ||v||_inf drops below this value.
    std::optional<double> stop_below_sup_v;
    /// Times at which (u, v) are stored; steps are shortened to land on them.
    std::vector<double> snapshot_times;

    void validate() const;
    bool operator==(const StepControl&) const = default;
};

/// Per-step bookkeeping over every accepted step of a run.
struct StepAudit
{
    long steps = 0;
    long rejections = 0;
    double dt_smallest = 0;
    double dt_largest = 0;
    double dt_mean = 0;
    /// max |int u' - int u - dt*ell*int uv| / int u
    double max_mass_u_residual = 0;
    /// max |int v' - int v + dt*int uv| / int v
    double max_mass_v_residual = 0;
    /// max (||v'||_inf - ||v||_inf) / ||v||_inf; <= 0 under the max principle
    double max_sup_v_increase = -1.0;
    /// max (int v' - int v) / int v
    double max_mass_v_increase = -1.0;
    double max_sup_u = 0;
    /// min over steps of min v / (min v0 e^{-U t}(1 - 10(dt + h^2))), U = running max ||u||_inf
    double min_comparison_ratio = 1.0;
    bool ceiling_exceeded = false;
};

struct Snapshot
{
    double t = 0;
    ScalarField u;
    ScalarField v;
};

struct Trajectory
{
    std::vector<DiagRecord> samples;
    std::vector<double> snapshot_times;
    std::vector<Snapshot> snapshots;
    State final;
    StepAudit audit;
    bool stopped_early = false;
};

double stable_dt(const State& s, const Params& p, const StepControl& c);

/// One forward Euler step of the regularized system.
State step_euler(const State& s, const Params& p, double dt);

/// Regularize u0, then integrate to c.t_end (or until the stop criterion) with
/// positivity-rejecting adaptive Euler steps.
Trajectory run(const ScalarField& u0, const ScalarField& v0, const Params& p,
               const StepControl& c, const DiagConfig& d);

} // namespace degen_taxis
