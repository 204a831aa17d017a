#pragma once

#include "degen_taxis/diagnostics.hpp"
#include "degen_taxis/model.hpp"
#include "degen_taxis/stepper.hpp"

#include <string>
#include <vector>

namespace degen_taxis
{

/// Run metadata needed to evaluate the a priori bounds from a sample series alone.
struct SeriesContext
{
    Params params;
    double area = 1.0;     ///< |Omega|
    double h = 0.0;        ///< smallest cell size
    double dt_mean = 0.0;
    double u_ceiling = 1e6;
};

SeriesContext context_of(const Trajectory& traj, const Params& p, const StepControl& c);

struct InvariantCheck
{
    std::string name;
    bool pass = false;
    double value = 0;  ///< worst observed quantity
    double limit = 0;  ///< bound it was compared against
};

struct ViolationReport
{
    std::vector<InvariantCheck> checks;

    bool all_pass() const;
    const InvariantCheck& at(const std::string& name) const;
};

/// 50 (dt_mean + h^2): relative tolerance for bounds that hold only up to discretization error.
double default_tol_pde(const SeriesContext& ctx);

/// Checks the mass window, nutrient monotonicity, the space-time bounds,
/// Lyapunov decay, q4 boundedness, the comparison lower bound on v and the
/// ||u||_inf ceiling over a sample series. A negative tol_pde selects the default.
ViolationReport check_invariants(const std::vector<DiagRecord>& samples, const SeriesContext& ctx,
                                 double tol_exact = 1e-10, double tol_pde = -1.0);

} // namespace degen_taxis
