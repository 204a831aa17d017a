#include "degen_taxis/error.hpp"
#include "degen_taxis/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace degen_taxis;

namespace
{

ScalarField random_positive(const GridSpec& g, unsigned seed, double lo = 0.2, double hi = 2.0)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g);
    for (double& x : f.values())
        x = dist(rng);
    return f;
}

double max_abs(std::span<const double> xs)
{
    double m = 0;
    for (double x : xs)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(Params{}.validate());
    CHECK_THROWS_AS((Params{0.0, 0.0, 0.01}).validate(), Error);
    CHECK_THROWS_AS((Params{1.0, -1.0, 0.01}).validate(), Error);
    CHECK_THROWS_AS((Params{1.0, 0.0, 1.0}).validate(), Error);
    CHECK_THROWS_AS((Params{1.0, 0.0, -0.1}).validate(), Error);
    try
    {
        Params{-1.0, 0.0, 0.0}.validate();
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::RangeError);
        CHECK(std::string(e.what()).find("chi > 0") != std::string::npos);
    }
}

TEST_CASE("regularized initial data")
{
    const GridSpec g(8, 6, 1.0, 2.0);
    const ScalarField a = regularize_initial(ScalarField(g, 0.0), 0.1);
    for (double x : a.values())
        CHECK(x == doctest::Approx(0.1));
    const ScalarField b = regularize_initial(ScalarField(g, 1.0), 0.01);
    for (double x : b.values())
        CHECK(x == doctest::Approx(1.01));

    const ScalarField u0 = random_positive(g, 3, 0.0, 1.0);
    const ScalarField r = regularize_initial(u0, 0.05);
    CHECK(integrate(r) == doctest::Approx(integrate(u0) + 0.05 * 2.0).epsilon(1e-13));
    CHECK(r.min() >= 0.05);

    ScalarField neg(g, 1.0);
    neg(2, 2) = -1e-3;
    try
    {
        regularize_initial(neg, 0.1);
        FAIL("negative initial data must throw");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::NegativeInitialData);
    }
}

TEST_CASE("flux of the first equation")
{
    const GridSpec g(4, 4, 1.0, 1.0);
    const Params p{1.5, 0.0, 0.0};
    const FaceField c = flux_u(ScalarField(g, 2.0), ScalarField(g, 0.7), p);
    CHECK(max_abs(c.x_faces()) == 0.0);
    CHECK(max_abs(c.y_faces()) == 0.0);

    const ScalarField u = random_positive(g, 11);
    const FaceField dv0 = flux_u(u, ScalarField(g, 0.0), p);
    CHECK(max_abs(dv0.x_faces()) == 0.0);
    CHECK(max_abs(dv0.y_faces()) == 0.0);
    const FaceField du0 = flux_u(ScalarField(g, 0.0), random_positive(g, 12), p);
    CHECK(max_abs(du0.x_faces()) == 0.0);
    CHECK(max_abs(du0.y_faces()) == 0.0);

    // chi = 0, linear profile: face flux = mean(u) * mean(v) * du/dx
    const auto lin = ScalarField::from_function(g, [](double x, double) { return 1.0 + x; });
    const FaceField f = flux_u(lin, ScalarField(g, 1.0), Params{0.0, 0.0, 0.0});
    for (int j = 0; j < 4; ++j)
        for (int i = 1; i < 4; ++i)
        {
            const double mean = 0.5 * (lin(i - 1, j) + lin(i, j));
            CHECK(f.x(i, j) == doctest::Approx(mean * 1.0).epsilon(1e-13));
        }
    CHECK(f.boundary_is_zero());
}

TEST_CASE("flux is affine in chi")
{
    const GridSpec g(9, 7, 1.0, 1.0);
    const ScalarField u = random_positive(g, 21);
    const ScalarField v = random_positive(g, 22);
    const FaceField f1 = flux_u(u, v, Params{0.7, 0.0, 0.0});
    const FaceField f2 = flux_u(u, v, Params{1.9, 0.0, 0.0});
    const FaceField f12 = flux_u(u, v, Params{2.6, 0.0, 0.0});
    const FaceField diffusive = flux_u(u, v, Params{0.0, 0.0, 0.0});
    double scale = std::max(max_abs(f12.x_faces()), max_abs(f12.y_faces()));
    for (std::size_t k = 0; k < f1.x_faces().size(); ++k)
        CHECK(std::abs(f1.x_faces()[k] + f2.x_faces()[k] - f12.x_faces()[k] - diffusive.x_faces()[k]) <=
              1e-13 * scale);
    for (std::size_t k = 0; k < f1.y_faces().size(); ++k)
        CHECK(std::abs(f1.y_faces()[k] + f2.y_faces()[k] - f12.y_faces()[k] - diffusive.y_faces()[k]) <=
              1e-13 * scale);
}

TEST_CASE("right-hand sides on homogeneous states")
{
    const GridSpec g(5, 5, 1.0, 1.0);
    const ScalarField ru = rhs_u(ScalarField(g, 2.0), ScalarField(g, 0.5), Params{1.0, 1.0, 0.0});
    for (double x : ru.values())
        CHECK(x == doctest::Approx(1.0));
    const ScalarField ru3 = rhs_u(ScalarField(g, 3.0), ScalarField(g, 0.25), Params{1.0, 2.0, 0.0});
    for (double x : ru3.values())
        CHECK(x == doctest::Approx(2.0 * 3.0 * 0.25));
    const ScalarField rv = rhs_v(ScalarField(g, 2.0), ScalarField(g, 0.5));
    for (double x : rv.values())
        CHECK(x == doctest::Approx(-1.0));

    const ScalarField u = random_positive(g, 4);
    const ScalarField rvb = rhs_v(u, ScalarField(g, 0.3));
    for (std::size_t k = 0; k < u.size(); ++k)
        CHECK(rvb[k] == doctest::Approx(-0.3 * u[k]).epsilon(1e-14));
}

TEST_CASE("mass production identities")
{
    const GridSpec g(17, 11, 1.0, 1.5);
    for (unsigned seed = 1; seed <= 10; ++seed)
    {
        const ScalarField u = random_positive(g, seed);
        const ScalarField v = random_positive(g, seed + 100);
        const double uv = integrate(u * v);

        const ScalarField r0 = rhs_u(u, v, Params{2.0, 0.0, 0.0});
        CHECK(std::abs(integrate(r0)) <= 1e-13 * std::max(1.0, linf(r0)));

        const double ell = 0.7;
        const ScalarField r1 = rhs_u(u, v, Params{2.0, ell, 0.0});
        CHECK(std::abs(integrate(r1) - ell * uv) <= 1e-13 * std::max(1.0, linf(r1)));

        const ScalarField rv = rhs_v(u, v);
        CHECK(std::abs(integrate(rv) + uv) <= 1e-13 * std::max(1.0, linf(rv)));

        const ScalarField heat = rhs_v(ScalarField(g, 0.0), v);
        CHECK(std::abs(integrate(heat)) <= 1e-13 * std::max(1.0, linf(heat)));
    }
}
