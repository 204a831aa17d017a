#include "degen_taxis/ineq_lab.hpp"

#include "degen_taxis/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace degen_taxis
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void require_positive(const ScalarField& f, const char* name)
{
    if (!(f.min() > 0.0))
        throw Error(ErrorCode::PositivityViolated, std::string(name) + " must be strictly positive");
}

// vol * sum over interior faces of contrib(a, c, grad_phi, grad_psi), where a and c
// are the two adjacent cell indices.
template <class Contrib>
double face_integral(const ScalarField& phi, const ScalarField& psi, Contrib contrib)
{
    const GridSpec& g = phi.grid();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    double sum = 0.0;
    auto face = [&](std::size_t a, std::size_t c, double ih) {
        sum += contrib(a, c, (phi[c] - phi[a]) * ih, (psi[c] - psi[a]) * ih);
    };
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            face(g.index(i - 1, j), g.index(i, j), ihx);
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            face(g.index(i, j - 1), g.index(i, j), ihy);
    return g.cell_volume() * sum;
}

template <class Integrand>
double cell_integral(const GridSpec& g, Integrand f)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < g.cell_count(); ++k)
        sum += f(k);
    return g.cell_volume() * sum;
}

double safe_ratio(double num, double den)
{
    if (num == 0.0 && den == 0.0)
        return 0.0;
    return num / den;
}

} // namespace

void RandomFieldSpec::validate() const
{
    if (modes < 0)
        throw Error(ErrorCode::RangeError, "random field modes must be >= 0");
    if (!(floor > 0.0))
        throw Error(ErrorCode::RangeError, "random field floor must be > 0");
    if (!std::isfinite(amplitude) || !std::isfinite(decay))
        throw Error(ErrorCode::RangeError, "random field amplitude/decay must be finite");
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

ScalarField random_raw_field(const RandomFieldSpec& spec, std::uint64_t seed)
{
    const GridSpec& g = spec.grid;
    const int nm = spec.modes + 1;
    const double pi = std::numbers::pi;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(nm) * nm);
    for (int m = 0; m < nm; ++m)
        for (int n = 0; n < nm; ++n)
            a[m * nm + n] = spec.amplitude * coeff(rng) /
                            std::pow(1.0 + m * m + n * n, 0.5 * spec.decay);

    std::vector<double> cx(static_cast<std::size_t>(nm) * g.nx());
    std::vector<double> cy(static_cast<std::size_t>(nm) * g.ny());
    for (int m = 0; m < nm; ++m)
        for (int i = 0; i < g.nx(); ++i)
            cx[m * g.nx() + i] = std::cos(m * pi * g.x_center(i) / g.lx());
    for (int n = 0; n < nm; ++n)
        for (int j = 0; j < g.ny(); ++j)
            cy[n * g.ny() + j] = std::cos(n * pi * g.y_center(j) / g.ly());

    ScalarField out(g);
    std::vector<double> row(nm);
    for (int j = 0; j < g.ny(); ++j)
    {
        for (int m = 0; m < nm; ++m)
        {
            double s = 0.0;
            for (int n = 0; n < nm; ++n)
                s += a[m * nm + n] * cy[n * g.ny() + j];
            row[m] = s;
        }
        for (int i = 0; i < g.nx(); ++i)
        {
            double s = 0.0;
            for (int m = 0; m < nm; ++m)
                s += row[m] * cx[m * g.nx() + i];
            out(i, j) = s;
        }
    }
    return out;
}

ScalarField random_positive_field(const RandomFieldSpec& spec, std::uint64_t seed)
{
    spec.validate();
    ScalarField f = random_raw_field(spec, seed);
    const double shift = spec.floor - f.min();
    for (double& x : f.values())
        x += shift;
    return f;
}

double IneqReport::term(const std::string& name) const
{
    for (const auto& [key, value] : rhs_terms)
        if (key == name)
            return value;
    throw Error(ErrorCode::ConfigError, "report has no term '" + name + "'");
}

IneqReport ineq_A_ratio(const ScalarField& phi, const ScalarField& psi, double p)
{
    require_same_grid(phi, psi);
    require_positive(phi, "phi");
    require_positive(psi, "psi");
    if (!(p >= 1.0))
        throw Error(ErrorCode::RangeError, "p must be >= 1");
    const GridSpec& g = phi.grid();

    IneqReport r;
    r.p = p;
    r.lhs = cell_integral(g, [&](std::size_t k) { return std::pow(phi[k], p + 1.0) * psi[k]; });
    const double grad_psi = face_integral(phi, psi, [&](auto a, auto c, double, double gs) {
        return (phi[a] + phi[c]) / (psi[a] + psi[c]) * gs * gs;
    });
    const double grad_phi = face_integral(phi, psi, [&](auto a, auto c, double gp, double) {
        return (psi[a] + psi[c]) / (phi[a] + phi[c]) * gp * gp;
    });
    const double mixed = cell_integral(g, [&](std::size_t k) { return phi[k] * psi[k]; });
    const double phi_p = integrate_pow(phi, p);
    const double bracket = grad_psi + grad_phi + mixed;

    r.rhs_terms = {{"phi_over_psi_grad_psi", grad_psi},
                   {"psi_over_phi_grad_phi", grad_phi},
                   {"phi_psi", mixed},
                   {"phi_p", phi_p}};
    r.rhs_total = bracket * phi_p;
    r.ratio = r.lhs / r.rhs_total;
    return r;
}

IneqReport ineq_B_terms(const ScalarField& phi, const ScalarField& psi, double p, double eta)
{
    require_same_grid(phi, psi);
    require_positive(phi, "phi");
    require_positive(psi, "psi");
    if (!(p >= 1.0) || !(eta > 0.0))
        throw Error(ErrorCode::RangeError, "need p >= 1 and eta > 0");
    const GridSpec& g = phi.grid();

    IneqReport r;
    r.p = p;
    r.eta = eta;
    r.lhs = face_integral(phi, psi, [&](auto a, auto c, double, double gs) {
        const double pm = 0.5 * (phi[a] + phi[c]), sm = 0.5 * (psi[a] + psi[c]);
        return std::pow(pm, p + 1.0) * sm * gs * gs;
    });
    const double t1 = face_integral(phi, psi, [&](auto a, auto c, double gp, double) {
        const double pm = 0.5 * (phi[a] + phi[c]), sm = 0.5 * (psi[a] + psi[c]);
        return std::pow(pm, p - 1.0) * sm * gp * gp;
    });
    const double t2 = cell_integral(g, [&](std::size_t k) { return phi[k] * psi[k]; });

    const ScalarField g2 = grad_sq_cells(grad_faces(psi));
    const double q4 = cell_integral(g, [&](std::size_t k) {
        return g2[k] * g2[k] / (psi[k] * psi[k] * psi[k]);
    });
    const double s = linf(psi);
    const double phi_p1_psi =
        cell_integral(g, [&](std::size_t k) { return std::pow(phi[k], p + 1.0) * psi[k]; });
    const double t3 = (s + s * s * s) * phi_p1_psi * q4;
    const double t4 = s * s * s * s * std::pow(integrate(phi), 2.0 * p + 1.0) * q4;

    r.rhs_terms = {{"term1", t1}, {"term2", t2}, {"term3", t3}, {"term4", t4}};
    r.rhs_total = eta * (t1 + t2) + t3 + t4;
    const double excess = std::max(0.0, r.lhs - eta * t1 - eta * t2);
    if (t3 + t4 == 0.0)
    {
        if (excess > 0.0)
            throw Error(ErrorCode::DegenerateRHS,
                        "lhs exceeds the eta-terms while the constant-bearing terms vanish");
        r.ratio = 0.0;
    }
    else
    {
        r.ratio = excess / (t3 + t4);
    }
    return r;
}

HessianReport ineq_hessian_ratios(const ScalarField& psi)
{
    require_positive(psi, "psi");
    const GridSpec& g = psi.grid();
    const CellGradient grad = central_gradient(psi);
    const ScalarField h2 = hessian_sq(psi);
    const ScalarField hl2 = hessian_sq(psi, HessianMode::Log, psi.min());

    HessianReport r;
    r.num1 = cell_integral(g, [&](std::size_t k) {
        const double s = psi[k];
        const double gg = grad.gx[k] * grad.gx[k] + grad.gy[k] * grad.gy[k];
        return h2[k] / s + gg * gg / (s * s * s);
    });
    r.den1 = cell_integral(g, [&](std::size_t k) { return psi[k] * hl2[k]; });
    r.num2 = cell_integral(g, [&](std::size_t k) {
        const double s = psi[k];
        const double gg = grad.gx[k] * grad.gx[k] + grad.gy[k] * grad.gy[k];
        return gg * gg * gg / (s * s * s * s * s);
    });
    r.den2 = cell_integral(g, [&](std::size_t k) {
        const double gg = grad.gx[k] * grad.gx[k] + grad.gy[k] * grad.gy[k];
        return gg * hl2[k] / psi[k];
    });
    r.r1 = safe_ratio(r.num1, r.den1);
    r.r2 = safe_ratio(r.num2, r.den2);
    return r;
}

double sobolev_ratio(const ScalarField& rho)
{
    const GridSpec& g = rho.grid();
    const ScalarField g2 = grad_sq_cells(grad_faces(rho));
    const double grad_l1 = cell_integral(g, [&](std::size_t k) { return std::sqrt(g2[k]); });
    const double l1 = cell_integral(g, [&](std::size_t k) { return std::abs(rho[k]); });
    const double den = grad_l1 * grad_l1 + l1 * l1;
    if (den == 0.0)
        throw Error(ErrorCode::ZeroField, "Sobolev ratio of the zero field");
    return integrate(rho * rho) / den;
}

MoserResult moser_bound_check(double a, double b, double d, double m0, int kmax)
{
    if (!(a >= 1.0) || !(b >= 1.0) || !(d >= 0.0) || !(m0 >= 1.0) || kmax < 3)
        throw Error(ErrorCode::RangeError,
                    "Moser check needs a >= 1, b >= 1, d >= 0, M0 >= 1 and kmax >= 3");
    MoserResult r;
    const double la = std::log(a), lb = std::log(b);
    r.log_m.push_back(std::log(m0));
    for (int k = 1; k <= kmax; ++k)
    {
        const double two_k = std::ldexp(1.0, k);
        const double x = k * la + (2.0 + d / two_k) * r.log_m.back();
        const double y = two_k * lb;
        const double hi = std::max(x, y), lo = std::min(x, y);
        r.log_m.push_back(hi + std::log1p(std::exp(lo - hi)));
    }

    auto root = [&](int k) { return r.log_m[k] / std::ldexp(1.0, k); };
    double min_all = root(1), min_tail = root(kmax);
    for (int k = 1; k <= kmax; ++k)
    {
        min_all = std::min(min_all, root(k));
        if (2 * k >= kmax)
            min_tail = std::min(min_tail, root(k));
    }
    r.min_root = std::exp(min_all);
    r.liminf_estimate = std::exp(min_tail);
    r.log_bound = std::exp(0.5 * d) *
                  (std::log(2.0 * std::numbers::sqrt2) + 3.0 * la + (1.0 + 0.5 * d) * lb +
                   std::log(m0));
    r.bound = std::exp(r.log_bound);
    r.pass = min_tail <= r.log_bound + std::log1p(1e-9);
    return r;
}

IneqReport ineq_moser_split(const ScalarField& phi, const ScalarField& psi, double p, double eta)
{
    require_same_grid(phi, psi);
    require_positive(phi, "phi");
    require_positive(psi, "psi");
    if (!(p >= moser_p_star))
        throw Error(ErrorCode::RangeError, "moser split needs p >= 4");
    if (!(eta > 0.0 && eta <= 1.0))
        throw Error(ErrorCode::RangeError, "moser split needs eta in (0,1]");
    const GridSpec& g = phi.grid();

    IneqReport r;
    r.p = p;
    r.eta = eta;
    r.lhs = cell_integral(g, [&](std::size_t k) { return std::pow(phi[k], p + 1.0) * psi[k]; });
    const double grad_term = face_integral(phi, psi, [&](auto a, auto c, double gp, double) {
        const double pm = 0.5 * (phi[a] + phi[c]), sm = 0.5 * (psi[a] + psi[c]);
        return std::pow(pm, p - 1.0) * sm * gp * gp;
    });
    const double half_moment = integrate_pow(phi, 0.5 * p);
    const ScalarField g2 = grad_sq_cells(grad_faces(psi));
    const double q6 = cell_integral(g, [&](std::size_t k) {
        const double s = psi[k];
        return g2[k] * g2[k] * g2[k] / (s * s * s * s * s);
    });
    const double mixed = cell_integral(g, [&](std::size_t k) { return phi[k] * psi[k]; });

    const double t1 = eta * grad_term;
    const double t2 = eta * std::pow(half_moment, 2.0 * (p + 1.0) / p) * q6;
    const double denom = half_moment * half_moment * mixed;
    r.rhs_terms = {{"eta_grad_phi", t1}, {"eta_q6", t2}, {"normalizer", denom}};
    r.rhs_total = t1 + t2 + denom;
    r.ratio = (r.lhs - t1 - t2) / denom;
    return r;
}

IneqKind parse_ineq_kind(const std::string& name)
{
    if (name == "A")
        return IneqKind::A;
    if (name == "B")
        return IneqKind::B;
    if (name == "hessian")
        return IneqKind::Hessian;
    if (name == "sobolev")
        return IneqKind::Sobolev;
    if (name == "moser-split")
        return IneqKind::MoserSplit;
    throw Error(ErrorCode::ConfigError, "unknown inequality '" + name + "'");
}

std::string to_string(IneqKind kind)
{
    switch (kind)
    {
    case IneqKind::A: return "A";
    case IneqKind::B: return "B";
    case IneqKind::Hessian: return "hessian";
    case IneqKind::Sobolev: return "sobolev";
    case IneqKind::MoserSplit: return "moser-split";
    }
    return "?";
}

std::vector<double> running_max(const std::vector<double>& values)
{
    std::vector<double> out(values.size());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k)
        out[k] = m = std::max(m, values[k]);
    return out;
}

SweepResult run_sweep(const SweepOptions& o)
{
    if (o.samples < 1)
        throw Error(ErrorCode::RangeError, "sweep needs at least one sample");
    o.field.validate();
    const auto n = static_cast<std::size_t>(o.samples);
    SweepResult res;
    res.values.assign(n, 0.0);
    if (o.kind == IneqKind::Hessian)
        res.second.assign(n, 0.0);

    auto trial = [&](std::size_t k) {
        const std::uint64_t seed = trial_seed(o.master_seed, k);
        switch (o.kind)
        {
        case IneqKind::A:
            res.values[k] = ineq_A_ratio(random_positive_field(o.field, trial_seed(seed, 0)),
                                         random_positive_field(o.field, trial_seed(seed, 1)), o.p)
                                .ratio;
            break;
        case IneqKind::B:
            res.values[k] = ineq_B_terms(random_positive_field(o.field, trial_seed(seed, 0)),
                                         random_positive_field(o.field, trial_seed(seed, 1)), o.p,
                                         o.eta)
                                .ratio;
            break;
        case IneqKind::Hessian: {
            const HessianReport h = ineq_hessian_ratios(random_positive_field(o.field, seed));
            res.values[k] = h.r1;
            res.second[k] = h.r2;
            break;
        }
        case IneqKind::Sobolev:
            res.values[k] = sobolev_ratio(random_raw_field(o.field, seed));
            break;
        case IneqKind::MoserSplit:
            res.values[k] = ineq_moser_split(random_positive_field(o.field, trial_seed(seed, 0)),
                                             random_positive_field(o.field, trial_seed(seed, 1)),
                                             o.p, o.eta)
                                .ratio;
            break;
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(o.threads, 1, n);
    if (workers == 1)
    {
        for (std::size_t k = 0; k < n; ++k)
            trial(k);
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < n; k += workers)
                    trial(k);
            });
    }

    res.max_value = res.values[0];
    res.argmax_seed = trial_seed(o.master_seed, 0);
    for (std::size_t k = 0; k < n; ++k)
    {
        res.all_finite = res.all_finite && std::isfinite(res.values[k]);
        if (res.values[k] > res.max_value)
        {
            res.max_value = res.values[k];
            res.argmax_seed = trial_seed(o.master_seed, k);
        }
    }
    for (double x : res.second)
    {
        res.all_finite = res.all_finite && std::isfinite(x);
        res.max_second = std::max(res.max_second, x);
    }
    return res;
}

MoserSplitFit moser_split_slope(SweepOptions options, const std::vector<double>& p_values)
{
    if (p_values.size() < 2)
        throw Error(ErrorCode::RangeError, "slope fit needs at least two exponents");
    options.kind = IneqKind::MoserSplit;
    MoserSplitFit fit;
    fit.p_values = p_values;
    for (double p : p_values)
    {
        options.p = p;
        fit.max_witness.push_back(run_sweep(options).max_value);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(p_values.size());
    for (std::size_t k = 0; k < p_values.size(); ++k)
    {
        if (!(fit.max_witness[k] > 0.0))
            throw Error(ErrorCode::DegenerateRHS, "nonpositive maximal witness; slope undefined");
        const double x = std::log(p_values[k]), y = std::log(fit.max_witness[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

} // namespace degen_taxis
