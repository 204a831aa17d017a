#pragma once

#include "degen_taxis/grid.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace degen_taxis
{

/// Smooth random fields built from a decaying cosine series.
struct RandomFieldSpec
{
    GridSpec grid{64, 64, 1.0, 1.0};
    int modes = 6;          ///< max frequency index M in each direction
    double amplitude = 0.5;
    double floor = 0.2;     ///< minimum of the shifted field
    double decay = 2.0;     ///< coefficients weighted by (1+m^2+n^2)^{-decay/2}

    void validate() const;
};

/// amplitude * sum a_mn cos(m pi x/lx) cos(n pi y/ly) / (1+m^2+n^2)^{decay/2},
/// a_mn ~ U[-1,1] drawn in (m,n) row order. Sign-changing.
ScalarField random_raw_field(const RandomFieldSpec& spec, std::uint64_t seed);

/// The raw field shifted so that its minimum equals spec.floor.
ScalarField random_positive_field(const RandomFieldSpec& spec, std::uint64_t seed);

/// Independent stream seed for trial `index` of a batch.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

struct IneqReport
{
    double lhs = 0;
    std::vector<std::pair<std::string, double>> rhs_terms;
    double rhs_total = 0;
    double ratio = 0;
    std::uint64_t seed = 0;
    double p = 0;
    double eta = 0;

    double term(const std::string& name) const;
};

/// int phi^{p+1} psi  against  {int (phi/psi)|grad psi|^2 + int (psi/phi)|grad phi|^2
/// + int phi psi} * int phi^p. ratio is the empirical C(p) of this pair.
IneqReport ineq_A_ratio(const ScalarField& phi, const ScalarField& psi, double p);

/// int phi^{p+1} psi |grad psi|^2 against the four-term bound with constants set
/// to 1; ratio = max(0, lhs - eta*term1 - eta*term2) / (term3 + term4).
IneqReport ineq_B_terms(const ScalarField& phi, const ScalarField& psi, double p, double eta);

struct HessianReport
{
    double num1 = 0;  ///< int psi^{-1}|D^2 psi|^2 + int psi^{-3}|grad psi|^4
    double den1 = 0;  ///< int psi |D^2 ln psi|^2
    double num2 = 0;  ///< int |grad psi|^6 / psi^5
    double den2 = 0;  ///< int psi^{-1}|grad psi|^2 |D^2 ln psi|^2
    double r1 = 0;
    double r2 = 0;
};

HessianReport ineq_hessian_ratios(const ScalarField& psi);

/// int rho^2 / (||grad rho||_1^2 + ||rho||_1^2).
double sobolev_ratio(const ScalarField& rho);

struct MoserResult
{
    std::vector<double> log_m;   ///< ln M_k for k = 0..kmax
    double liminf_estimate = 0;  ///< min of M_k^{2^-k} over kmax/2 <= k <= kmax
    double min_root = 0;         ///< min of M_k^{2^-k} over 1 <= k <= kmax
    double log_bound = 0;        ///< ln of (2 sqrt2 a^3 b^{1+d/2} M0)^{e^{d/2}}
    double bound = 0;            ///< may be +inf when it overflows a double
    bool pass = false;
};

/// Runs the extremal recursion M_k = a^k M_{k-1}^{2+d 2^-k} + b^{2^k} in log space.
MoserResult moser_bound_check(double a, double b, double d, double m0, int kmax);

inline constexpr double moser_p_star = 4.0;

/// int phi^{p+1} psi against eta int phi^{p-1} psi |grad phi|^2
/// + eta {int phi^{p/2}}^{2(p+1)/p} int |grad psi|^6/psi^5; the residual is
/// normalized by {int phi^{p/2}}^2 int phi psi and reported as ratio.
IneqReport ineq_moser_split(const ScalarField& phi, const ScalarField& psi, double p, double eta);

// ---------------------------------------------------------------------------
// Sweeps

enum class IneqKind
{
    A,
    B,
    Hessian,
    Sobolev,
    MoserSplit,
};

IneqKind parse_ineq_kind(const std::string& name);
std::string to_string(IneqKind kind);

struct SweepOptions
{
    IneqKind kind = IneqKind::A;
    RandomFieldSpec field;
    double p = 1.0;
    double eta = 0.125;
    int samples = 1000;
    std::uint64_t master_seed = 1;
    int threads = 1;
};

struct SweepResult
{
    /// Per-trial witness in trial order; Hessian sweeps store r1 here and r2 in `second`.
    std::vector<double> values;
    std::vector<double> second;
    double max_value = 0;
    double max_second = 0;
    std::uint64_t argmax_seed = 0;
    bool all_finite = true;
};

/// Running supremum of `values` (nondecreasing by construction).
std::vector<double> running_max(const std::vector<double>& values);

SweepResult run_sweep(const SweepOptions& options);

struct MoserSplitFit
{
    std::vector<double> p_values;
    std::vector<double> max_witness;
    double slope = 0;  ///< least-squares slope of ln(max witness) vs ln p, the empirical 2 kappa
};

MoserSplitFit moser_split_slope(SweepOptions options, const std::vector<double>& p_values);

} // namespace degen_taxis
