#pragma once

#include "degen_taxis/diagnostics.hpp"
#include "degen_taxis/grid.hpp"
#include "degen_taxis/model.hpp"
#include "degen_taxis/stepper.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace degen_taxis
{

/// Flat run configuration. Text form is `key = value` per line, `#` starts a
/// comment; list values are comma separated; optional values accept `none`.
///
///   key                   default      constraint
///   grid.nx, grid.ny      64           >= 2
///   grid.lx, grid.ly      1            > 0
///   params.chi            1            > 0
///   params.ell            0            >= 0
///   params.eps            0.01         [0, 1)
///   step.cfl_safety       0.4          (0, 1]
///   step.dt_min           1e-12        > 0, <= dt_max
///   step.dt_max           0.01         > 0
///   step.t_end            1            > 0
///   step.max_rejections   40           >= 0
///   step.fixed_dt         none         > 0
///   step.u_ceiling        1e6          > 0
///   step.stop_below_sup_v none         > 0
///   step.snapshot_times   (empty)      increasing, >= 0
///   diag.b                1            > 0
///   diag.p_list           2,3,5        each >= 1
///   diag.stride           20           >= 1
///   diag.positivity_floor 1e-14        >= 0
///   diag.dictionary_size  25           >= 1
///   init.preset           homogeneous  homogeneous|branching|small_v0|eps_study|longtime
///   init.v_bar            0.01         > 0 (small_v0 nutrient level)
///   run.seed              1            unsigned integer
///   run.output_dir        out
struct RunConfig
{
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    Params params;
    StepControl step;
    DiagConfig diag;
    std::string preset = "homogeneous";
    double v_bar = 0.01;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    GridSpec grid() const { return GridSpec(nx, ny, lx, ly); }
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Throws ParseError (with line number), UnknownKey or RangeError.
RunConfig parse_config(std::string_view text);

/// Every key, in the documented order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

} // namespace degen_taxis
