#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace degen_taxis
{

/// Uniform cell-centered grid on the rectangle (0,lx) x (0,ly).
class GridSpec
{
public:
    GridSpec(int nx, int ny, double lx, double ly);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double hx() const noexcept { return lx_ / nx_; }
    double hy() const noexcept { return ly_ / ny_; }
    double h_min() const noexcept;
    double cell_volume() const noexcept { return hx() * hy(); }
    double area() const noexcept { return lx_ * ly_; }
    std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

    double x_center(int i) const noexcept { return (i + 0.5) * hx(); }
    double y_center(int j) const noexcept { return (j + 0.5) * hy(); }

    std::size_t index(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    bool operator==(const GridSpec&) const = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

/// Cell-centered values, row-major with rows along x (index = j*nx + i).
class ScalarField
{
public:
    explicit ScalarField(const GridSpec& grid, double value = 0.0);
    ScalarField(const GridSpec& grid, std::vector<double> values);

    static ScalarField from_function(const GridSpec& grid,
                                     const std::function<double(double, double)>& f);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double min() const;
    double max() const;
    bool all_finite() const noexcept;
    /// Throws NonFiniteValue naming `what` if any entry is NaN or Inf.
    void ensure_finite(const char* what) const;

    bool operator==(const ScalarField&) const = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Face-normal values. x_faces[j*(nx+1)+i] sits between cells (i-1,j) and (i,j);
/// y_faces[j*nx+i] between (i,j-1) and (i,j). Boundary faces carry 0.
class FaceField
{
public:
    explicit FaceField(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }

    std::size_t x_index(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(j) * (grid_.nx() + 1) + i;
    }
    std::size_t y_index(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(j) * grid_.nx() + i;
    }

    double& x(int i, int j) noexcept { return x_faces_[x_index(i, j)]; }
    double x(int i, int j) const noexcept { return x_faces_[x_index(i, j)]; }
    double& y(int i, int j) noexcept { return y_faces_[y_index(i, j)]; }
    double y(int i, int j) const noexcept { return y_faces_[y_index(i, j)]; }

    std::span<double> x_faces() noexcept { return x_faces_; }
    std::span<const double> x_faces() const noexcept { return x_faces_; }
    std::span<double> y_faces() noexcept { return y_faces_; }
    std::span<const double> y_faces() const noexcept { return y_faces_; }

    /// True when every boundary face entry is exactly zero.
    bool boundary_is_zero() const noexcept;

private:
    GridSpec grid_;
    std::vector<double> x_faces_;
    std::vector<double> y_faces_;
};

enum class HessianMode
{
    Plain,
    Log,
};

/// Deterministic pairwise sum (fixed tree shape for a given length).
double pairwise_sum(std::span<const double> values);

void require_same_grid(const ScalarField& a, const ScalarField& b);

double integrate(const ScalarField& f);
FaceField grad_faces(const ScalarField& f);
ScalarField div_faces(const FaceField& flux);
ScalarField laplacian(const ScalarField& f);

/// Per-cell |D^2 f|^2 = f_xx^2 + 2 f_xy^2 + f_yy^2 with reflected ghosts.
/// In Log mode the stencil is applied to ln f; requires min f >= floor > 0.
ScalarField hessian_sq(const ScalarField& f, HessianMode mode = HessianMode::Plain,
                       double floor = 0.0);

/// Cell-centered central-difference gradient with reflected ghosts.
struct CellGradient
{
    ScalarField gx;
    ScalarField gy;
};
CellGradient central_gradient(const ScalarField& f);

/// Per-cell |grad|^2 reconstructed from face components: mean of the squared
/// x-face values on both sides plus the same for y.
ScalarField grad_sq_cells(const FaceField& g);

double linf(const ScalarField& f);
double lp_norm(const ScalarField& f, double p);

/// Integral of f^p; p may be fractional only when f >= 0.
double integrate_pow(const ScalarField& f, double p);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

} // namespace degen_taxis
