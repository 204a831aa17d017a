#include "degen_taxis/grid.hpp"

#include "degen_taxis/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace degen_taxis
{

namespace
{

// Mirror an out-of-range index back into [0, n) across the boundary face.
inline int reflect(int i, int n) noexcept
{
    if (i < 0)
        return -i - 1;
    if (i >= n)
        return 2 * n - i - 1;
    return i;
}

template <class Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op)
{
    require_same_grid(a, b);
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = op(a[k], b[k]);
    return out;
}

} // namespace

GridSpec::GridSpec(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly)
{
    if (nx < 2 || ny < 2)
        throw Error(ErrorCode::InvalidGrid,
                    "grid needs nx >= 2 and ny >= 2, got " + std::to_string(nx) + "x" +
                        std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw Error(ErrorCode::InvalidGrid, "domain extents must be positive and finite");
}

double GridSpec::h_min() const noexcept
{
    return std::min(hx(), hy());
}

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), values_(grid.cell_count(), value)
{
}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.cell_count())
        throw Error(ErrorCode::GridMismatch,
                    "value count " + std::to_string(values_.size()) + " does not match grid " +
                        std::to_string(grid_.cell_count()));
}

ScalarField ScalarField::from_function(const GridSpec& grid,
                                       const std::function<double(double, double)>& f)
{
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i)
            out(i, j) = f(grid.x_center(i), grid.y_center(j));
    return out;
}

double ScalarField::min() const
{
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const
{
    return *std::max_element(values_.begin(), values_.end());
}

bool ScalarField::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void ScalarField::ensure_finite(const char* what) const
{
    if (!all_finite())
        throw Error(ErrorCode::NonFiniteValue, std::string(what) + " contains NaN or Inf");
}

FaceField::FaceField(const GridSpec& grid)
    : grid_(grid),
      x_faces_(static_cast<std::size_t>(grid.nx() + 1) * grid.ny(), 0.0),
      y_faces_(static_cast<std::size_t>(grid.nx()) * (grid.ny() + 1), 0.0)
{
}

bool FaceField::boundary_is_zero() const noexcept
{
    const int nx = grid_.nx(), ny = grid_.ny();
    for (int j = 0; j < ny; ++j)
        if (x(0, j) != 0.0 || x(nx, j) != 0.0)
            return false;
    for (int i = 0; i < nx; ++i)
        if (y(i, 0) != 0.0 || y(i, ny) != 0.0)
            return false;
    return true;
}

double pairwise_sum(std::span<const double> values)
{
    constexpr std::size_t block = 64;
    if (values.size() <= block)
    {
        double s = 0.0;
        for (double x : values)
            s += x;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void require_same_grid(const ScalarField& a, const ScalarField& b)
{
    if (!(a.grid() == b.grid()))
        throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

double integrate(const ScalarField& f)
{
    return f.grid().cell_volume() * pairwise_sum(f.values());
}

FaceField grad_faces(const ScalarField& f)
{
    const GridSpec& g = f.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    FaceField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            out.x(i, j) = (f(i, j) - f(i - 1, j)) * ihx;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.y(i, j) = (f(i, j) - f(i, j - 1)) * ihy;
    return out;
}

ScalarField div_faces(const FaceField& flux)
{
    const GridSpec& g = flux.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    ScalarField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = (flux.x(i + 1, j) - flux.x(i, j)) * ihx +
                        (flux.y(i, j + 1) - flux.y(i, j)) * ihy;
    return out;
}

ScalarField laplacian(const ScalarField& f)
{
    return div_faces(grad_faces(f));
}

ScalarField hessian_sq(const ScalarField& f, HessianMode mode, double floor)
{
    const GridSpec& g = f.grid();
    ScalarField w = f;
    if (mode == HessianMode::Log)
    {
        if (!(floor > 0.0) || f.min() < floor)
            throw Error(ErrorCode::NonPositiveField,
                        "log-Hessian needs min f >= floor > 0, got min " + std::to_string(f.min()));
        for (double& x : w.values())
            x = std::log(x);
    }

    const int nx = g.nx(), ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    const double ihxy = 1.0 / (4.0 * g.hx() * g.hy());
    ScalarField out(g);
    for (int j = 0; j < ny; ++j)
    {
        const int jm = reflect(j - 1, ny), jp = reflect(j + 1, ny);
        for (int i = 0; i < nx; ++i)
        {
            const int im = reflect(i - 1, nx), ip = reflect(i + 1, nx);
            const double c = w(i, j);
            const double fxx = (w(ip, j) - 2.0 * c + w(im, j)) * ihx2;
            const double fyy = (w(i, jp) - 2.0 * c + w(i, jm)) * ihy2;
            const double fxy = (w(ip, jp) - w(ip, jm) - w(im, jp) + w(im, jm)) * ihxy;
            out(i, j) = fxx * fxx + 2.0 * fxy * fxy + fyy * fyy;
        }
    }
    return out;
}

CellGradient central_gradient(const ScalarField& f)
{
    const GridSpec& g = f.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 0.5 / g.hx(), ihy = 0.5 / g.hy();
    CellGradient out{ScalarField(g), ScalarField(g)};
    for (int j = 0; j < ny; ++j)
    {
        const int jm = reflect(j - 1, ny), jp = reflect(j + 1, ny);
        for (int i = 0; i < nx; ++i)
        {
            const int im = reflect(i - 1, nx), ip = reflect(i + 1, nx);
            out.gx(i, j) = (f(ip, j) - f(im, j)) * ihx;
            out.gy(i, j) = (f(i, jp) - f(i, jm)) * ihy;
        }
    }
    return out;
}

ScalarField grad_sq_cells(const FaceField& gf)
{
    const GridSpec& g = gf.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
        {
            const double w = gf.x(i, j), e = gf.x(i + 1, j);
            const double s = gf.y(i, j), n = gf.y(i, j + 1);
            out(i, j) = 0.5 * (w * w + e * e) + 0.5 * (s * s + n * n);
        }
    return out;
}

double linf(const ScalarField& f)
{
    double m = 0.0;
    for (double x : f.values())
        m = std::max(m, std::abs(x));
    return m;
}

double integrate_pow(const ScalarField& f, double p)
{
    const bool integral_p = (p == std::floor(p));
    std::vector<double> tmp(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
    {
        const double x = f[k];
        if (!integral_p && x < 0.0)
            throw Error(ErrorCode::NegativeFieldForFractionalPower,
                        "fractional power " + std::to_string(p) + " of a negative value");
        tmp[k] = std::pow(x, p);
    }
    return f.grid().cell_volume() * pairwise_sum(tmp);
}

double lp_norm(const ScalarField& f, double p)
{
    if (!(p >= 1.0))
        throw Error(ErrorCode::RangeError, "lp_norm needs p >= 1");
    if (p != std::floor(p) && f.min() < 0.0)
        throw Error(ErrorCode::NegativeFieldForFractionalPower,
                    "fractional lp_norm of a sign-changing field");
    ScalarField a(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k)
        a[k] = std::abs(f[k]);
    return std::pow(integrate_pow(a, p), 1.0 / p);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    return zip(a, b, [](double x, double y) { return x + y; });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    return zip(a, b, [](double x, double y) { return x - y; });
}

ScalarField operator*(const ScalarField& a, const ScalarField& b)
{
    return zip(a, b, [](double x, double y) { return x * y; });
}

ScalarField operator*(double s, const ScalarField& a)
{
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = s * a[k];
    return out;
}

} // namespace degen_taxis
