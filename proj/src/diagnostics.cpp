#include "degen_taxis/diagnostics.hpp"

#include "degen_taxis/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace degen_taxis
{

void DiagConfig::validate() const
{
    if (!(b > 0.0))
        throw Error(ErrorCode::RangeError, "diag.b must be > 0");
    for (double p : p_list)
        if (!(p >= 1.0))
            throw Error(ErrorCode::RangeError, "diag.p_list entries must be >= 1");
    if (stride < 1)
        throw Error(ErrorCode::RangeError, "diag.stride must be >= 1");
    if (!(positivity_floor >= 0.0))
        throw Error(ErrorCode::RangeError, "diag.positivity_floor must be >= 0");
    if (dictionary_size < 1)
        throw Error(ErrorCode::RangeError, "diag.dictionary_size must be >= 1");
}

StepRates step_rates(const ScalarField& u, const ScalarField& v, double positivity_floor)
{
    require_same_grid(u, v);
    const GridSpec& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    const double vol = g.cell_volume();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();

    StepRates r;
    r.min_u = u.min();
    r.min_v = v.min();
    if (!(r.min_u > positivity_floor) || !(r.min_v > positivity_floor))
        throw Error(ErrorCode::PositivityFloorViolated,
                    "diagnostics need min u, min v > floor (min u = " + std::to_string(r.min_u) +
                        ", min v = " + std::to_string(r.min_v) + ")");
    r.sup_u = u.max();
    r.sup_v = v.max();
    r.mass_u = vol * pairwise_sum(u.values());
    r.mass_v = vol * pairwise_sum(v.values());

    double uv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        uv += u[k] * v[k];
    r.r_uv = vol * uv;

    // Quadratic integrands per face; |grad v|^2 per cell from squared face components.
    double diss_u = 0, diss_v = 0, vgv = 0, gv2 = 0;
    std::vector<double> cell_g2(u.size(), 0.0);
    auto face = [&](std::size_t a, std::size_t c, double ih) {
        const double gu = (u[c] - u[a]) * ih;
        const double gv = (v[c] - v[a]) * ih;
        const double um = 0.5 * (u[a] + u[c]);
        const double vm = 0.5 * (v[a] + v[c]);
        const double gv_sq = gv * gv;
        diss_u += vm / um * gu * gu;
        diss_v += um / vm * gv_sq;
        vgv += vm * gv_sq;
        gv2 += gv_sq;
        cell_g2[a] += 0.5 * gv_sq;
        cell_g2[c] += 0.5 * gv_sq;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            face(g.index(i - 1, j), g.index(i, j), ihx);
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            face(g.index(i, j - 1), g.index(i, j), ihy);

    double q4 = 0, q6 = 0, gmax = 0;
    for (std::size_t k = 0; k < u.size(); ++k)
    {
        const double g2 = cell_g2[k];
        const double vk = v[k];
        const double v3 = vk * vk * vk;
        q4 += g2 * g2 / v3;
        q6 += g2 * g2 * g2 / (v3 * vk * vk);
        gmax = std::max(gmax, g2);
    }

    r.diss_u = vol * diss_u;
    r.diss_v = vol * diss_v;
    r.v_gradv2 = vol * vgv;
    r.gradv2 = vol * gv2;
    r.q4 = vol * q4;
    r.q6 = vol * q6;
    r.sup_gradv = std::sqrt(gmax);
    return r;
}

DiagRecord functionals(const State& s, const Params& p, const DiagConfig& d)
{
    const StepRates r = step_rates(s.u, s.v, d.positivity_floor);
    DiagRecord rec;
    rec.t = s.t;
    rec.mass_u = r.mass_u;
    rec.mass_v = r.mass_v;
    rec.sup_v = r.sup_v;
    rec.min_v = r.min_v;
    rec.sup_u = r.sup_u;
    rec.min_u = r.min_u;
    rec.sup_gradv = r.sup_gradv;
    rec.diss_u = r.diss_u;
    rec.diss_v = r.diss_v;
    rec.v_gradv2 = r.v_gradv2;
    rec.gradv2 = r.gradv2;
    rec.q4 = r.q4;
    rec.q6 = r.q6;
    rec.r_uv = r.r_uv;

    const double vol = s.u.grid().cell_volume();
    double ent = 0, lg = 0;
    for (double x : s.u.values())
    {
        const double l = std::log(x);
        ent += x * l;
        lg += l;
    }
    rec.ent_u = vol * ent;
    rec.log_u = vol * lg;
    rec.lyap = -rec.log_u + 0.5 * p.chi * rec.gradv2;
    rec.energy = 4.0 * d.b * rec.ent_u + rec.q4;
    rec.lp_u.reserve(d.p_list.size());
    for (double q : d.p_list)
        rec.lp_u.push_back(integrate_pow(s.u, q));
    return rec;
}

namespace
{

const std::vector<std::string>& head_columns()
{
    static const std::vector<std::string> cols{
        "t",     "mass_u", "mass_v", "sup_v",    "min_v", "sup_u",  "min_u",
        "sup_gradv", "ent_u", "log_u", "gradv2", "lyap", "diss_u", "diss_v",
        "v_gradv2", "q4", "q6", "energy", "r_uv"};
    return cols;
}

const std::vector<std::string>& tail_columns()
{
    static const std::vector<std::string> cols{"cum_uv",  "cum_diss_u", "cum_diss_v",
                                               "cum_q4",  "cum_q6",     "cum_mass_v",
                                               "cum_vgradv2"};
    return cols;
}

std::vector<double*> head_fields(DiagRecord& r)
{
    return {&r.t,      &r.mass_u,    &r.mass_v, &r.sup_v, &r.min_v,  &r.sup_u, &r.min_u,
            &r.sup_gradv, &r.ent_u, &r.log_u, &r.gradv2, &r.lyap,  &r.diss_u, &r.diss_v,
            &r.v_gradv2, &r.q4,      &r.q6,     &r.energy, &r.r_uv};
}

std::vector<double*> tail_fields(DiagRecord& r)
{
    return {&r.cum_uv, &r.cum_diss_u, &r.cum_diss_v, &r.cum_q4,
            &r.cum_q6, &r.cum_mass_v, &r.cum_vgradv2};
}

} // namespace

std::string lp_column_name(double p)
{
    std::ostringstream os;
    os << "lp_u_" << p;
    return os.str();
}

std::vector<std::string> record_columns(const std::vector<double>& p_list)
{
    std::vector<std::string> cols = head_columns();
    for (double p : p_list)
        cols.push_back(lp_column_name(p));
    const auto& tail = tail_columns();
    cols.insert(cols.end(), tail.begin(), tail.end());
    return cols;
}

std::vector<double> record_row(const DiagRecord& r)
{
    DiagRecord copy = r;
    std::vector<double> row;
    for (double* f : head_fields(copy))
        row.push_back(*f);
    row.insert(row.end(), r.lp_u.begin(), r.lp_u.end());
    for (double* f : tail_fields(copy))
        row.push_back(*f);
    return row;
}

DiagRecord record_from_row(const std::vector<std::string>& columns,
                           const std::vector<double>& values)
{
    if (columns.size() != values.size())
        throw Error(ErrorCode::ParseError, "row width does not match header");
    std::unordered_map<std::string, double> by_name;
    for (std::size_t k = 0; k < columns.size(); ++k)
        by_name[columns[k]] = values[k];

    DiagRecord r;
    auto take = [&](const std::vector<std::string>& names, const std::vector<double*>& fields) {
        for (std::size_t k = 0; k < names.size(); ++k)
        {
            auto it = by_name.find(names[k]);
            if (it == by_name.end())
                throw Error(ErrorCode::ParseError, "series is missing column '" + names[k] + "'");
            *fields[k] = it->second;
        }
    };
    take(head_columns(), head_fields(r));
    take(tail_columns(), tail_fields(r));
    for (const auto& c : columns)
        if (c.rfind("lp_u_", 0) == 0)
            r.lp_u.push_back(by_name[c]);
    return r;
}

DualDictionary::DualDictionary(const GridSpec& grid, int size) : grid_(grid)
{
    if (size < 1)
        throw Error(ErrorCode::RangeError, "dictionary size must be >= 1");
    const double pi = std::numbers::pi;
    for (int total = 0; static_cast<int>(modes_.size()) < size; ++total)
        for (int m = 0; m <= total && static_cast<int>(modes_.size()) < size; ++m)
            modes_.emplace_back(m, total - m);

    const double lx = grid.lx(), ly = grid.ly();
    for (auto [m, n] : modes_)
    {
        const double scale = 1.0 / (1.0 + pi * m / lx + pi * n / ly);
        functions_.push_back(ScalarField::from_function(grid, [=](double x, double y) {
            return scale * std::cos(m * pi * x / lx) * std::cos(n * pi * y / ly);
        }));
    }
}

double DualDictionary::distance(const ScalarField& u1, const ScalarField& u2) const
{
    require_same_grid(u1, u2);
    if (!(u1.grid() == grid_))
        throw Error(ErrorCode::GridMismatch, "dictionary built for a different grid");
    const ScalarField diff = u1 - u2;
    double best = 0.0;
    for (const auto& phi : functions_)
        best = std::max(best, std::abs(integrate(diff * phi)));
    return best;
}

double dual_distance(const ScalarField& u1, const ScalarField& u2, const DiagConfig& d)
{
    require_same_grid(u1, u2);
    return DualDictionary(u1.grid(), d.dictionary_size).distance(u1, u2);
}

} // namespace degen_taxis
