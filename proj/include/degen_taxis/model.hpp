#pragma once

#include "degen_taxis/grid.hpp"

namespace degen_taxis
{

/// Model constants: chemotactic sensitivity, growth coefficient, regularization.
struct Params
{
    double chi = 1.0;
    double ell = 0.0;
    double eps = 0.01;

    /// Throws RangeError unless chi > 0, ell >= 0, 0 <= eps < 1.
    void validate() const;
    bool operator==(const Params&) const = default;
};

struct State
{
    ScalarField u;
    ScalarField v;
    double t = 0.0;
};

/// u0 + eps pointwise. Throws NegativeInitialData if min u0 < 0.
ScalarField regularize_initial(const ScalarField& u0, double eps);

/// Face flux (uv)_f grad u - chi (u^2 v)_f grad v, with (uv)_f = mean(u) mean(v)
/// and (u^2 v)_f = mean(u)^2 mean(v). Boundary faces are zero.
FaceField flux_u(const ScalarField& u, const ScalarField& v, const Params& p);

/// div(flux_u) + ell*u*v.
ScalarField rhs_u(const ScalarField& u, const ScalarField& v, const Params& p);

/// laplacian(v) - u*v.
ScalarField rhs_v(const ScalarField& u, const ScalarField& v);

} // namespace degen_taxis
