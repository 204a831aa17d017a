#pragma once

#include "degen_taxis/diagnostics.hpp"
#include "degen_taxis/grid.hpp"
#include "degen_taxis/invariants.hpp"
#include "degen_taxis/model.hpp"
#include "degen_taxis/stepper.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degen_taxis
{

using FieldGenerator = std::function<ScalarField(const GridSpec&)>;

/// A runnable scenario: initial data generators plus the full run configuration.
struct Preset
{
    std::string name;
    GridSpec grid{32, 32, 1.0, 1.0};
    Params params;
    StepControl step;
    DiagConfig diag;
    FieldGenerator make_u0;
    FieldGenerator make_v0;

    double v_threshold = 1e-3;      ///< longtime: stop once ||v||_inf drops below this
    double stop_factor = 1e-4;      ///< v0 scaling: stop once ||v||_inf < stop_factor * v_bar
    double retention = 0.5;         ///< v0 scaling: required variance(u(T)) / variance(u0)
    std::vector<double> eps_list;   ///< eps study: descending regularizations
    std::vector<double> v0_bars;    ///< v0 scaling: descending nutrient levels

    ScalarField u0() const { return make_u0(grid); }
    ScalarField v0() const { return make_v0(grid); }
};

struct PresetOptions
{
    std::optional<GridSpec> grid;   ///< overrides the preset's own grid
    double v_bar = 0.01;            ///< small_v0 nutrient level
    std::uint64_t seed = 1;         ///< longtime perturbation
};

const std::vector<std::string>& preset_names();

/// homogeneous | branching | small_v0 | eps_study | longtime. Throws UnknownPreset.
Preset preset(const std::string& name, const PresetOptions& options = {});

/// Gaussian of width 0.05*lx centred in the domain, scaled so its discrete integral is `mass`.
ScalarField gaussian_inoculum(const GridSpec& grid, double mass);

struct RunSummary
{
    std::string label;
    double parameter = 0;           ///< eps or v_bar of this sweep member
    double t_final = 0;
    long steps = 0;
    long rejections = 0;
    bool stopped_early = false;
    bool invariants_pass = false;
    std::vector<std::string> failed_checks;
    double mass_u_initial = 0;
    double mass_u_final = 0;
    double mass_v_initial = 0;
    double sup_v_final = 0;
};

struct Criterion
{
    std::string name;
    bool pass = false;
    double value = 0;
    double limit = 0;
    std::string note;
    bool applicable = true;         ///< false: excluded from all_pass (e.g. 0/0 ratios)
};

struct StudyReport
{
    std::string study;
    std::vector<RunSummary> runs;
    std::vector<std::pair<std::string, double>> values;
    std::vector<Criterion> criteria;
    std::vector<std::string> artifacts;

    bool all_pass() const;
    double value(const std::string& name) const;
    const Criterion& criterion(const std::string& name) const;
};

struct StudyOptions
{
    int threads = 1;
    std::filesystem::path output_dir;   ///< empty: no files written
};

/// Population variance of a field over the domain: int (f - mean)^2 / |Omega|.
double field_variance(const ScalarField& f);

/// Trapezoidal-in-time L1(Omega x (0,T)) distance between two snapshot sequences taken at
/// the same times.
double space_time_l1(const std::vector<Snapshot>& a, const std::vector<Snapshot>& b);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// int u0 <= final mass_u <= int u0 + ell int v0, both ends relaxed by tol (relative to int u0).
Criterion mass_window(double mass_u_final, double mass_u0, double mass_v0, double ell,
                      double tol = 1e-9);

/// Runs f(0), ..., f(n-1) on up to `threads` workers; each index is visited exactly once.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

/// D(eps_k, eps_{k+1}) for consecutive members; pass iff strictly decreasing.
/// Needs eps_list strictly decreasing, each in (0,1), length >= 3 (ConfigError otherwise).
StudyReport run_eps_study(const std::vector<double>& eps_list, const Preset& base,
                          const StudyOptions& options = {});

/// Integrates until ||v||_inf < v_threshold, then reports T*, the mass window and the
/// dual distances between u(0), u(T*/2) and u(T*). Not reaching the threshold is a
/// failed criterion, not an error.
StudyReport run_longtime(const Preset& base, double v_threshold, const StudyOptions& options = {});

/// For each v_bar, runs small_v0 data until ||v||_inf < stop_factor * v_bar and reports
/// delta = dual_distance(u(T), u0), the fitted exponent of delta vs int v0 and variance
/// retention for the smallest v_bar.
StudyReport run_v0_scaling(const std::vector<double>& v0_bars, const Preset& base,
                           const StudyOptions& options = {});

/// Dispatches a preset's own study: eps_study, longtime and small_v0 run their sweeps;
/// homogeneous and branching run one trajectory and report the invariant suite.
StudyReport run_preset_study(const Preset& p, const StudyOptions& options = {});

} // namespace degen_taxis
