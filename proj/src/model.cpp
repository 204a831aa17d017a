#include "degen_taxis/model.hpp"

#include "degen_taxis/error.hpp"

#include <cmath>
#include <string>

namespace degen_taxis
{

void Params::validate() const
{
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw Error(ErrorCode::RangeError, "chi must satisfy chi > 0, got " + std::to_string(chi));
    if (!(ell >= 0.0) || !std::isfinite(ell))
        throw Error(ErrorCode::RangeError, "ell must satisfy ell >= 0, got " + std::to_string(ell));
    if (!(eps >= 0.0 && eps < 1.0))
        throw Error(ErrorCode::RangeError,
                    "eps must satisfy 0 <= eps < 1, got " + std::to_string(eps));
}

ScalarField regularize_initial(const ScalarField& u0, double eps)
{
    if (!(eps >= 0.0 && eps < 1.0))
        throw Error(ErrorCode::RangeError, "eps must lie in [0,1)");
    if (u0.min() < 0.0)
        throw Error(ErrorCode::NegativeInitialData,
                    "initial density has negative entries (min " + std::to_string(u0.min()) + ")");
    ScalarField out = u0;
    for (double& x : out.values())
        x += eps;
    return out;
}

FaceField flux_u(const ScalarField& u, const ScalarField& v, const Params& p)
{
    require_same_grid(u, v);
    const GridSpec& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    const double chi = p.chi;
    FaceField out(g);

    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
        {
            const double ul = u(i - 1, j), ur = u(i, j);
            const double vl = v(i - 1, j), vr = v(i, j);
            const double um = 0.5 * (ul + ur), vm = 0.5 * (vl + vr);
            out.x(i, j) = um * vm * (ur - ul) * ihx - chi * um * um * vm * (vr - vl) * ihx;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
        {
            const double ul = u(i, j - 1), ur = u(i, j);
            const double vl = v(i, j - 1), vr = v(i, j);
            const double um = 0.5 * (ul + ur), vm = 0.5 * (vl + vr);
            out.y(i, j) = um * vm * (ur - ul) * ihy - chi * um * um * vm * (vr - vl) * ihy;
        }
    return out;
}

ScalarField rhs_u(const ScalarField& u, const ScalarField& v, const Params& p)
{
    ScalarField out = div_faces(flux_u(u, v, p));
    if (p.ell != 0.0)
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] += p.ell * u[k] * v[k];
    return out;
}

ScalarField rhs_v(const ScalarField& u, const ScalarField& v)
{
    require_same_grid(u, v);
    ScalarField out = laplacian(v);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] -= u[k] * v[k];
    return out;
}

} // namespace degen_taxis
