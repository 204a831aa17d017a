#pragma once

#include "degen_taxis/grid.hpp"
#include "degen_taxis/model.hpp"

#include <string>
#include <vector>

namespace degen_taxis
{

struct DiagConfig
{
    double b = 1.0;                    ///< weight of int u ln u in the energy functional
    std::vector<double> p_list{2.0, 3.0, 5.0};
    int stride = 20;                   ///< accepted steps between samples
    double positivity_floor = 1e-14;
    int dictionary_size = 25;

    void validate() const;
    bool operator==(const DiagConfig&) const = default;
};

/// Rates needed every step for the running space-time integrals.
struct StepRates
{
    double mass_u = 0;
    double mass_v = 0;
    double r_uv = 0;       ///< int u v
    double sup_u = 0;
    double min_u = 0;
    double sup_v = 0;
    double min_v = 0;
    double diss_u = 0;     ///< int (v/u)|grad u|^2
    double diss_v = 0;     ///< int (u/v)|grad v|^2
    double v_gradv2 = 0;   ///< int v|grad v|^2
    double gradv2 = 0;     ///< int |grad v|^2
    double q4 = 0;         ///< int |grad v|^4 / v^3
    double q6 = 0;         ///< int |grad v|^6 / v^5
    double sup_gradv = 0;
};

StepRates step_rates(const ScalarField& u, const ScalarField& v, double positivity_floor);

struct DiagRecord
{
    double t = 0;
    double mass_u = 0;
    double mass_v = 0;
    double sup_v = 0;
    double min_v = 0;
    double sup_u = 0;
    double min_u = 0;
    double sup_gradv = 0;
    double ent_u = 0;      ///< int u ln u
    double log_u = 0;      ///< int ln u
    double gradv2 = 0;
    double lyap = 0;       ///< -int ln u + (chi/2) int |grad v|^2
    double diss_u = 0;
    double diss_v = 0;
    double v_gradv2 = 0;
    double q4 = 0;
    double q6 = 0;
    double energy = 0;     ///< 4 b int u ln u + q4
    double r_uv = 0;
    std::vector<double> lp_u; ///< int u^p, parallel to DiagConfig::p_list

    double cum_uv = 0;
    double cum_diss_u = 0;
    double cum_diss_v = 0;
    double cum_q4 = 0;
    double cum_q6 = 0;
    double cum_mass_v = 0;
    double cum_vgradv2 = 0;
};

/// Instantaneous functionals of a state; cumulative fields are left at zero.
DiagRecord functionals(const State& s, const Params& p, const DiagConfig& d);

/// CSV column order: fixed scalar fields, then lp_u_<p> per exponent, then the
/// cumulative fields.
std::vector<std::string> record_columns(const std::vector<double>& p_list);
std::vector<double> record_row(const DiagRecord& r);
DiagRecord record_from_row(const std::vector<std::string>& columns,
                           const std::vector<double>& values);
std::string lp_column_name(double p);

/// Low-frequency cosine test functions scaled so that ||phi||_inf + ||grad phi||_inf <= 1.
class DualDictionary
{
public:
    DualDictionary(const GridSpec& grid, int size);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return modes_.size(); }
    std::pair<int, int> mode(std::size_t k) const { return modes_[k]; }

    /// max_k |int (u1 - u2) phi_k|
    double distance(const ScalarField& u1, const ScalarField& u2) const;

private:
    GridSpec grid_;
    std::vector<std::pair<int, int>> modes_;
    std::vector<ScalarField> functions_;
};

/// Dictionary proxy for the (W^{1,inf})* distance. Lower bound, not the true norm.
double dual_distance(const ScalarField& u1, const ScalarField& u2, const DiagConfig& d);

} // namespace degen_taxis
