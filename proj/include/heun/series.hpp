#pragma once

#include <array>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "heun/errors.hpp"
#include "heun/geometry.hpp"

namespace heun::series {

using cplx = std::complex<double>;

// The symmetric four-point equation in its rational form
//
//   F'' + (1/2) sum_j 1/(z - z_j) F' + (1/P(z)) (lambda + sum_j q_j/(z - z_j)) F = 0
//
// with P(z) = prod_j (z - z_j). The four singular points are finite,
// pairwise distinct and nonzero; infinity is an ordinary point. The local
// exponents at z_j are alpha_j = cos^2(chi_j)/2 and beta_j = 1/2 - alpha_j
// (the second form keeps the exponent sum per point exactly 1/2 in floating
// point), and q_j = alpha_j beta_j P'(z_j).
struct SymmetricHeunConfig {
    std::array<cplx, 4> z{};
    std::array<cplx, 4> chi{};
    cplx lambda{};
};

// Throws DegeneracyError("DegenerateConfig") on coincident/zero/non-finite
// singular points or non-finite chi/lambda.
void validate(const SymmetricHeunConfig& cfg);

struct DerivedParams {
    std::array<cplx, 4> alpha{}, beta{}, q{};
};
DerivedParams derived_params(const SymmetricHeunConfig& cfg);

// (alpha_j, beta_j) at the 1-based singular index j; these are the two roots
// of rho^2 - rho/2 + alpha_j beta_j = 0.
std::pair<cplx, cplx> indicial_exponents(const SymmetricHeunConfig& cfg, int j);

enum class Branch { first, second };  // first picks alpha_j, second beta_j
enum class SeriesKind { taylor, frobenius };

inline constexpr int default_terms = 64;
inline constexpr int max_terms = 4096;
inline constexpr double default_safety = 0.95;

// One local solution: prefactor (z - center)^exponent times a truncated
// power series in w = z - center. For Frobenius solutions the coefficients
// are normalized to c_0 = 1 and the branch cut of the prefactor runs along
// the ray center + t * e^{i branch_cut_direction}, t >= 0. The original
// configuration and construction parameters ride along so the solution can
// be rebuilt at a higher truncation order.
struct LocalSolution {
    cplx center{};
    cplx exponent{};
    std::vector<cplx> coefficients;
    double conv_radius = 0.0;
    double branch_cut_direction = 0.0;

    SymmetricHeunConfig config;
    SeriesKind kind = SeriesKind::taylor;
    int sing_index = 0;  // 1-based, Frobenius only
    Branch branch = Branch::first;
    cplx init_value{}, init_slope{};  // Taylor only
};

// Taylor expansion at a regular point with prescribed value and slope.
// Errors: DegeneracyError("CenterIsSingular") when the center is within
// 1e-12 of a singular point.
LocalSolution taylor_solution(const SymmetricHeunConfig& cfg, cplx center,
                              cplx init_value, cplx init_slope,
                              int n_terms = default_terms);

// Frobenius expansion at z_j, exponent alpha_j (first) or beta_j (second).
// The default cut direction is arg(z_j), i.e. the ray z_j * t, t >= 1.
// Errors: DegeneracyError("DegenerateExponents") when alpha_j - beta_j is
// within 1e-9 of an integer (logarithmic case, out of scope).
LocalSolution frobenius_solution(const SymmetricHeunConfig& cfg, int j,
                                 Branch branch, int n_terms = default_terms);

// Same solution, recomputed with a different truncation order.
LocalSolution extend(const LocalSolution& sol, int n_terms);

struct EvalResult {
    cplx value{};
    cplx derivative{};
    double tail = 0.0;  // |c_N w^N| / |partial sum|, the truncation estimate
};

// Series evaluation at z. Requires |z - center| <= safety * conv_radius and
// z off the branch cut when the exponent is not an integer.
// Errors: DomainError("OutsideDisc"), DomainError("OnBranchCut"),
// ConvergenceError("NotConverged") when the tail estimate exceeds tolerance.
EvalResult evaluate(const LocalSolution& sol, cplx z, double tolerance = 1e-10,
                    double safety = default_safety);

// As evaluate, but doubles the truncation order (up to max_terms, caching
// the extension in sol) until the tail estimate meets tolerance.
EvalResult evaluate_adaptive(LocalSolution& sol, cplx z,
                             double tolerance = 1e-10,
                             double safety = default_safety);

// F1 F2' - F1' F2 at z for two solutions sharing a center (exact same
// center value required).
cplx wronskian(const LocalSolution& sol1, const LocalSolution& sol2, cplx z,
               double tolerance = 1e-10);

// Max relative residual of the recurrence re-substituted through order
// N - 2; computed by direct series convolution, independent of the solver.
double recurrence_residual(const LocalSolution& sol);

// Independent oracle: integrate the equation as a first-order system along
// the straight segment from start to end. The segment must keep a clearance
// of 0.05 * (min pairwise singular distance) from every singular point.
// init is (value, slope) at start.
// Errors: DomainError("PathTooCloseToSingularity"),
// ConvergenceError("StepUnderflow").
std::array<cplx, 2> integrate_path(const SymmetricHeunConfig& cfg, cplx start,
                                   std::array<cplx, 2> init, cplx end,
                                   double rtol = 1e-12);

// Standard general Heun form
//   H'' + (gamma/x + delta/(x-1) + epsilon/(x-a)) H'
//       + (alpha beta x - q) / (x(x-1)(x-a)) H = 0.
struct StandardHeunParams {
    cplx a{}, q{}, alpha{}, beta{}, gamma{}, delta{}, epsilon{};
};

// Conjugation between the symmetric form and the standard form:
// F(z) = H(moebius(z)) * prod_k (z - z_k)^{nu_k}, where moebius sends
// (z_1, z_2, z_4) -> (0, 1, infinity) and z_3 -> a.
struct StandardFormMap {
    StandardHeunParams params;
    std::array<cplx, 4> nu{};
    geometry::MoebiusMap moebius;
};

// Derives the full parameter set. The exponent data fixes everything except
// the accessory parameter q, which is extracted numerically from the
// transformed equation at sample points and cross-checked for constancy.
// Errors: DegeneracyError("DegenerateConfig"),
// ConvergenceError("NotConverged") when the extraction is inconsistent.
StandardFormMap standard_form_map(const SymmetricHeunConfig& cfg);

// Oracle integration of the standard form, singular set {0, 1, a}.
std::array<cplx, 2> integrate_standard(const StandardHeunParams& p, cplx start,
                                       std::array<cplx, 2> init, cplx end,
                                       double rtol = 1e-12);

namespace detail {

// Shared driver: y'' + p(z) y' + q(z) y = 0 integrated along the straight
// segment start -> end, with a clearance pre-check against the given
// singular points. Exposed for the two integrate_* wrappers and for test
// oracles that need other linear equations.
std::array<cplx, 2> integrate_segment(
    const std::function<cplx(cplx)>& p, const std::function<cplx(cplx)>& q,
    const std::vector<cplx>& singular, double min_clearance, cplx start,
    std::array<cplx, 2> init, cplx end, double rtol);

}  // namespace detail

}  // namespace heun::series
