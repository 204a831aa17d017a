#include "degen_taxis/error.hpp"
#include "degen_taxis/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace degen_taxis;

namespace
{

ScalarField random_positive(const GridSpec& g, unsigned seed, double lo = 0.5, double hi = 1.5)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g);
    for (double& x : f.values())
        x = dist(rng);
    return f;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
}

} // namespace

TEST_CASE("step control validation")
{
    CHECK_NOTHROW(StepControl{}.validate());
    StepControl c;
    c.cfl_safety = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = StepControl{};
    c.dt_min = 1.0;
    c.dt_max = 0.1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = StepControl{};
    c.t_end = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = StepControl{};
    c.snapshot_times = {0.2, 0.1};
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("stable step size")
{
    const GridSpec g(64, 64, 1.0, 1.0);
    const double h = 1.0 / 64;
    StepControl c;
    const State s{ScalarField(g, 1.0), ScalarField(g, 1.0), 0.0};
    CHECK(stable_dt(s, Params{1.0, 0.0, 0.01}, c) == doctest::Approx(0.1 * h * h).epsilon(1e-14));
    CHECK(stable_dt(s, Params{1.0, 0.0, 0.01}, c) == doctest::Approx(2.44140625e-5).epsilon(1e-12));

    const State frozen{ScalarField(g, 3.0), ScalarField(g, 0.0), 0.0};
    CHECK(stable_dt(frozen, Params{}, c) == c.dt_max);

    const GridSpec coarse(4, 4, 1.0, 1.0);
    StepControl wide;
    wide.dt_max = 1.0;
    const State a{ScalarField(coarse, 100.0), ScalarField(coarse, 1e-6), 0.0};
    const State b{ScalarField(coarse, 200.0), ScalarField(coarse, 1e-6), 0.0};
    const double ratio = stable_dt(a, Params{}, wide) / stable_dt(b, Params{}, wide);
    CHECK(std::abs(ratio - 2.0) <= 1e-12);
}

TEST_CASE("one Euler step")
{
    const GridSpec g(8, 8, 1.0, 1.0);
    const double a = 1.3, b = 0.6, dt = 1e-3;
    const Params p{1.0, 0.8, 0.0};
    const State s{ScalarField(g, a), ScalarField(g, b), 0.25};
    const State n = step_euler(s, p, dt);
    CHECK(n.t == doctest::Approx(0.251));
    for (std::size_t k = 0; k < n.u.size(); ++k)
    {
        CHECK(n.u[k] == doctest::Approx(a + dt * p.ell * a * b).epsilon(1e-15));
        CHECK(n.v[k] == doctest::Approx(b - dt * a * b).epsilon(1e-15));
    }

    const GridSpec r(16, 12, 1.0, 1.0);
    for (unsigned seed = 1; seed <= 5; ++seed)
    {
        const State q{random_positive(r, seed), random_positive(r, seed + 50), 0.0};
        const double uv = integrate(q.u * q.v);
        const double step = 1e-4;

        const State n0 = step_euler(q, Params{2.0, 0.0, 0.0}, step);
        CHECK(std::abs(integrate(n0.u) - integrate(q.u)) <= 1e-12 * integrate(q.u));

        const State n1 = step_euler(q, Params{2.0, 1.5, 0.0}, step);
        CHECK(std::abs(integrate(n1.u) - integrate(q.u) - step * 1.5 * uv) <= 1e-12 * integrate(q.u));
        CHECK(std::abs(integrate(n1.v) - integrate(q.v) + step * uv) <= 1e-12 * integrate(q.v));
        CHECK(integrate(n1.v) <= integrate(q.v));
    }
}

TEST_CASE("homogeneous run follows the exponential decay of v")
{
    const GridSpec g(32, 32, 1.0, 1.0);
    StepControl c;
    c.t_end = 0.5;
    const Trajectory tr = run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, c,
                              DiagConfig{});
    CHECK(tr.final.t == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tr.final.v.max() == doctest::Approx(std::exp(-0.5)).epsilon(2e-3 / std::exp(-0.5)));
    CHECK(std::abs(tr.final.v.max() - std::exp(-0.5)) <= 2e-3);
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
        CHECK(tr.samples[k].t > tr.samples[k - 1].t);
    CHECK(tr.samples.back().t == tr.final.t);
}

TEST_CASE("growth run conserves u + v")
{
    const GridSpec g(16, 16, 1.0, 1.0);
    StepControl c;
    c.t_end = 1.0;
    const Trajectory tr = run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 1.0, 0.0}, c,
                              DiagConfig{});
    for (const auto& s : tr.samples)
    {
        CHECK(std::abs(s.sup_u + s.sup_v - 2.0) <= 1e-10);
        CHECK(std::abs(s.min_u + s.min_v - 2.0) <= 1e-10);
    }
    for (std::size_t k = 0; k < tr.final.u.size(); ++k)
        CHECK(std::abs(tr.final.u[k] + tr.final.v[k] - 2.0) <= 1e-10);
}

TEST_CASE("forced step collapse")
{
    const GridSpec g(16, 16, 1.0, 1.0);
    StepControl c;
    c.dt_min = 10.0;
    c.dt_max = 10.0;
    c.t_end = 100.0;
    CHECK(code_of([&] {
              run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, c, DiagConfig{});
          }) == ErrorCode::StepCollapse);

    StepControl fixed;
    fixed.fixed_dt = 2.0;
    fixed.t_end = 4.0;
    CHECK(code_of([&] {
              run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, fixed,
                  DiagConfig{});
          }) == ErrorCode::StepCollapse);
}

TEST_CASE("snapshots, stride and early stop")
{
    const GridSpec g(16, 16, 1.0, 1.0);
    StepControl c;
    c.t_end = 0.3;
    c.snapshot_times = {0.0, 0.1, 0.2};
    DiagConfig d;
    d.stride = 7;
    const Trajectory tr =
        run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, c, d);
    REQUIRE(tr.snapshots.size() == 3);
    CHECK(tr.snapshots[0].t == 0.0);
    CHECK(tr.snapshots[1].t == 0.1);
    CHECK(tr.snapshots[2].t == 0.2);
    CHECK(tr.snapshot_times == std::vector<double>{0.0, 0.1, 0.2});
    CHECK(tr.snapshots[2].v.max() == doctest::Approx(std::exp(-0.2)).epsilon(2e-3));
    CHECK(tr.samples.size() >= static_cast<std::size_t>(tr.audit.steps / 7));

    StepControl stop;
    stop.t_end = 10.0;
    stop.stop_below_sup_v = 0.5;
    const Trajectory early =
        run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, stop, d);
    CHECK(early.stopped_early);
    CHECK(early.samples.back().sup_v < 0.5);
    CHECK(early.final.t == doctest::Approx(std::log(2.0)).epsilon(5e-3));
}

TEST_CASE("fixed-step homogeneous error is first order in time")
{
    const GridSpec g(4, 4, 1.0, 1.0);
    auto error_at = [&](double dt) {
        StepControl c;
        c.t_end = 0.5;
        c.fixed_dt = dt;
        const Trajectory tr =
            run(ScalarField(g, 1.0), ScalarField(g, 1.0), Params{1.0, 0.0, 0.0}, c, DiagConfig{});
        return std::abs(tr.final.v.max() - std::exp(-0.5));
    };
    const double e1 = error_at(0.01), e2 = error_at(0.005), e3 = error_at(0.0025);
    CHECK(std::log2(e1 / e2) >= 0.9);
    CHECK(std::log2(e2 / e3) >= 0.9);
}

TEST_CASE("run audit on a nonuniform state")
{
    const GridSpec g(24, 24, 1.0, 1.0);
    const auto u0 = ScalarField::from_function(g, [](double x, double y) {
        return std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.02);
    });
    const auto v0 = ScalarField::from_function(g, [](double x, double) { return 1.0 + 0.3 * x; });
    StepControl c;
    c.t_end = 0.1;
    const Trajectory tr = run(u0, v0, Params{2.0, 1.0, 0.01}, c, DiagConfig{});
    const auto& a = tr.audit;
    CHECK(a.steps > 0);
    CHECK(a.max_mass_u_residual <= 1e-12);
    CHECK(a.max_mass_v_residual <= 1e-12);
    CHECK(a.max_sup_v_increase <= 1e-12);
    CHECK(a.max_mass_v_increase <= 1e-12);
    CHECK(a.min_comparison_ratio >= 1.0);
    CHECK_FALSE(a.ceiling_exceeded);
    CHECK(tr.final.u.min() > 0.0);
    CHECK(tr.final.v.min() > 0.0);
    CHECK(a.dt_smallest <= a.dt_mean);
    CHECK(a.dt_mean <= a.dt_largest);
}

TEST_CASE("run rejects invalid initial data")
{
    const GridSpec g(8, 8, 1.0, 1.0);
    ScalarField u0(g, 1.0);
    u0(1, 1) = -0.5;
    CHECK(code_of([&] { run(u0, ScalarField(g, 1.0), Params{}, StepControl{}, DiagConfig{}); }) ==
          ErrorCode::NegativeInitialData);
    CHECK_THROWS_AS(
        run(ScalarField(g, 1.0), ScalarField(g, 0.0), Params{}, StepControl{}, DiagConfig{}), Error);
}
