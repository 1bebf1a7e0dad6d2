#include "heun/series.hpp"

#include <algorithm>
#include <cmath>

namespace heun::series {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double tiny = 1e-300;

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

double min_pairwise_distance(const std::array<cplx, 4>& z) {
    double d = std::abs(z[0] - z[1]);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) d = std::min(d, std::abs(z[i] - z[j]));
    return d;
}

// Polynomial coefficients (ascending powers of w = z - center) of the
// equation multiplied through by P^2:
//
//   A F'' + B F' + C F = 0,
//   A = P^2 (deg 8), B = P P' / 2 (deg 7),
//   C = lambda P + sum_j q_j prod_{i != j} (z - z_i) (deg 4).
//
// Built from linear factors (w + d_j), d_j = center - z_j, so that a
// Frobenius center gives d_j = 0 exactly and the indicial structure
// A_0 = A_1 = B_0 = 0 holds without cancellation error.
struct PolyOde {
    std::array<cplx, 9> A{};
    std::array<cplx, 8> B{};
    std::array<cplx, 5> C{};
};

std::vector<cplx> poly_mul(const std::vector<cplx>& p, const std::vector<cplx>& q) {
    std::vector<cplx> r(p.size() + q.size() - 1, cplx{});
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

std::vector<cplx> poly_derivative(const std::vector<cplx>& p) {
    if (p.size() <= 1) return {cplx{}};
    std::vector<cplx> r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = double(i) * p[i];
    return r;
}

PolyOde recentered_ode(const SymmetricHeunConfig& cfg, cplx center) {
    DerivedParams dp = derived_params(cfg);

    std::array<cplx, 4> d;
    for (int j = 0; j < 4; ++j) d[j] = center - cfg.z[j];

    std::vector<cplx> p{1.0};
    for (int j = 0; j < 4; ++j) p = poly_mul(p, {d[j], 1.0});

    std::vector<cplx> a = poly_mul(p, p);
    std::vector<cplx> b = poly_mul(p, poly_derivative(p));

    std::vector<cplx> c(5, cplx{});
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = cfg.lambda * p[i];
    for (int j = 0; j < 4; ++j) {
        std::vector<cplx> pj{1.0};
        for (int i = 0; i < 4; ++i)
            if (i != j) pj = poly_mul(pj, {d[i], 1.0});
        for (std::size_t i = 0; i < pj.size(); ++i) c[i] += dp.q[j] * pj[i];
    }

    PolyOde ode;
    for (int i = 0; i < 9; ++i) ode.A[i] = a[i];
    for (int i = 0; i < 8; ++i) ode.B[i] = 0.5 * b[i];
    for (int i = 0; i < 5; ++i) ode.C[i] = c[i];
    return ode;
}

// Kernel of the recurrence: the coefficient of c_n in the series identity
// at power w^{t + rho - 2} is
//   K(t, n) = A_{t+2-n} (n+rho)(n+rho-1) + B_{t+1-n} (n+rho) + C_{t-n}.
// A has degree 8, so only n in [t - 6, t + 2] contributes (nine terms).
cplx kernel(const PolyOde& ode, cplx rho, int t, int n, double* magnitude = nullptr) {
    cplx k{};
    double mag = 0.0;
    int ia = t + 2 - n, ib = t + 1 - n, ic = t - n;
    cplx np = double(n) + rho;
    if (ia >= 0 && ia <= 8) {
        cplx piece = ode.A[ia] * np * (np - 1.0);
        k += piece;
        mag += std::abs(piece);
    }
    if (ib >= 0 && ib <= 7) {
        cplx piece = ode.B[ib] * np;
        k += piece;
        mag += std::abs(piece);
    }
    if (ic >= 0 && ic <= 4) {
        cplx piece = ode.C[ic];
        k += piece;
        mag += std::abs(piece);
    }
    if (magnitude) *magnitude = mag;
    return k;
}

double conv_radius_at(const SymmetricHeunConfig& cfg, cplx center, int skip) {
    double r = -1.0;
    for (int i = 0; i < 4; ++i) {
        if (i == skip) continue;
        double d = std::abs(center - cfg.z[i]);
        if (r < 0.0 || d < r) r = d;
    }
    return r;
}

bool near_integer(cplx v, double tol) {
    return std::abs(v - cplx{std::round(v.real()), 0.0}) <= tol;
}

// Angle of w measured in the window (theta, theta + 2pi); used to keep the
// fractional power single-valued off the cut ray.
double cut_window_arg(cplx w, double theta) {
    double a = std::fmod(std::arg(w) - theta, two_pi);
    if (a < 0.0) a += two_pi;
    return theta + a;
}

}  // namespace

void validate(const SymmetricHeunConfig& cfg) {
    double s = 1.0;
    for (const auto& zj : cfg.z) {
        if (!finite(zj))
            throw DegeneracyError("DegenerateConfig", "singular point not finite");
        s = std::max(s, std::abs(zj));
    }
    for (int i = 0; i < 4; ++i) {
        if (std::abs(cfg.z[i]) <= 1e-13 * s)
            throw DegeneracyError("DegenerateConfig", "singular point at origin");
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(cfg.z[i] - cfg.z[j]) <= 1e-13 * s)
                throw DegeneracyError("DegenerateConfig",
                                      "coincident singular points");
    }
    for (const auto& c : cfg.chi)
        if (!finite(c))
            throw DegeneracyError("DegenerateConfig", "chi not finite");
    if (!finite(cfg.lambda))
        throw DegeneracyError("DegenerateConfig", "lambda not finite");
}

DerivedParams derived_params(const SymmetricHeunConfig& cfg) {
    DerivedParams dp;
    for (int j = 0; j < 4; ++j) {
        cplx cj = std::cos(cfg.chi[j]);
        dp.alpha[j] = 0.5 * cj * cj;
        dp.beta[j] = 0.5 - dp.alpha[j];
        cplx pp{1.0};
        for (int i = 0; i < 4; ++i)
            if (i != j) pp *= cfg.z[j] - cfg.z[i];
        dp.q[j] = dp.alpha[j] * dp.beta[j] * pp;
    }
    return dp;
}

std::pair<cplx, cplx> indicial_exponents(const SymmetricHeunConfig& cfg, int j) {
    if (j < 1 || j > 4)
        throw DomainError("BadIndex", "singular index must be in 1..4");
    DerivedParams dp = derived_params(cfg);
    return {dp.alpha[j - 1], dp.beta[j - 1]};
}

LocalSolution taylor_solution(const SymmetricHeunConfig& cfg, cplx center,
                              cplx init_value, cplx init_slope, int n_terms) {
    validate(cfg);
    n_terms = std::clamp(n_terms, 2, max_terms);
    double s = 1.0;
    for (const auto& zj : cfg.z) s = std::max(s, std::abs(zj));
    for (const auto& zj : cfg.z)
        if (std::abs(center - zj) <= 1e-12 * s)
            throw DegeneracyError("CenterIsSingular",
                                  "expansion point coincides with a singular point");

    PolyOde ode = recentered_ode(cfg, center);
    std::vector<cplx> c(std::size_t(n_terms) + 1);
    c[0] = init_value;
    c[1] = init_slope;
    for (int t = 0; t + 2 <= n_terms; ++t) {
        cplx acc{};
        for (int n = std::max(0, t - 6); n <= t + 1; ++n)
            acc += kernel(ode, cplx{}, t, n) * c[n];
        // K(t, t+2) = A_0 (t+2)(t+1), A_0 = P(center)^2 != 0
        c[t + 2] = -acc / (ode.A[0] * double(t + 2) * double(t + 1));
    }

    LocalSolution sol;
    sol.center = center;
    sol.exponent = cplx{};
    sol.coefficients = std::move(c);
    sol.conv_radius = conv_radius_at(cfg, center, -1);
    sol.branch_cut_direction = std::arg(center == cplx{} ? cplx{1.0} : center);
    sol.config = cfg;
    sol.kind = SeriesKind::taylor;
    sol.init_value = init_value;
    sol.init_slope = init_slope;
    return sol;
}

LocalSolution frobenius_solution(const SymmetricHeunConfig& cfg, int j,
                                 Branch branch, int n_terms) {
    validate(cfg);
    n_terms = std::clamp(n_terms, 2, max_terms);
    auto [alpha, beta] = indicial_exponents(cfg, j);
    if (near_integer(alpha - beta, 1e-9))
        throw DegeneracyError(
            "DegenerateExponents",
            "exponent difference within 1e-9 of an integer (logarithmic case)");

    cplx rho = (branch == Branch::first) ? alpha : beta;
    cplx other = (branch == Branch::first) ? beta : alpha;
    cplx center = cfg.z[j - 1];

    PolyOde ode = recentered_ode(cfg, center);
    std::vector<cplx> c(std::size_t(n_terms) + 1);
    c[0] = 1.0;
    // Diagonal K(t, t) = A_2 (t+rho-alpha)(t+rho-beta) with A_2 = P'(z_j)^2;
    // use that factored form directly, it is the indicial polynomial shifted
    // to t and cannot vanish for t >= 1 under the non-integer-difference
    // precondition.
    for (int t = 1; t <= n_terms; ++t) {
        cplx acc{};
        for (int n = std::max(0, t - 6); n < t; ++n)
            acc += kernel(ode, rho, t, n) * c[n];
        cplx diag = ode.A[2] * double(t) * (double(t) + rho - other);
        c[t] = -acc / diag;
    }

    LocalSolution sol;
    sol.center = center;
    sol.exponent = rho;
    sol.coefficients = std::move(c);
    sol.conv_radius = conv_radius_at(cfg, center, j - 1);
    sol.branch_cut_direction = std::arg(center);
    sol.config = cfg;
    sol.kind = SeriesKind::frobenius;
    sol.sing_index = j;
    sol.branch = branch;
    return sol;
}

LocalSolution extend(const LocalSolution& sol, int n_terms) {
    LocalSolution out =
        (sol.kind == SeriesKind::taylor)
            ? taylor_solution(sol.config, sol.center, sol.init_value,
                              sol.init_slope, n_terms)
            : frobenius_solution(sol.config, sol.sing_index, sol.branch, n_terms);
    out.branch_cut_direction = sol.branch_cut_direction;
    return out;
}

EvalResult evaluate(const LocalSolution& sol, cplx z, double tolerance,
                    double safety) {
    cplx w = z - sol.center;
    double r = std::abs(w);
    if (r > safety * sol.conv_radius)
        throw DomainError("OutsideDisc",
                          "evaluation point outside the safe convergence disc");

    bool integer_exp = near_integer(sol.exponent, 1e-12);

    if (r == 0.0) {
        EvalResult res;
        if (integer_exp) {
            int n = int(std::lround(sol.exponent.real()));
            if (n == 0) {
                res.value = sol.coefficients[0];
                res.derivative =
                    sol.coefficients.size() > 1 ? sol.coefficients[1] : cplx{};
            } else if (n == 1) {
                res.value = cplx{};
                res.derivative = sol.coefficients[0];
            } else {
                res.value = res.derivative = cplx{};
            }
            return res;
        }
        throw DomainError("OnBranchCut",
                          "evaluation at the branch point itself");
    }

    if (!integer_exp) {
        cplx d = w * std::polar(1.0, -sol.branch_cut_direction);
        if (d.real() > 0.0 && std::abs(d.imag()) <= 1e-12 * std::abs(d))
            throw DomainError("OnBranchCut", "evaluation point on the cut ray");
    }

    // Horner on the series and its term-wise derivative.
    const auto& c = sol.coefficients;
    cplx s{}, ds{};
    for (std::size_t i = c.size(); i-- > 0;) {
        ds = ds * w + s;
        s = s * w + c[i];
    }

    EvalResult res;
    std::size_t last = c.size() - 1;
    res.tail = std::abs(c[last]) * std::pow(r, double(last)) /
               std::max(std::abs(s), tiny);
    // NaN tails (overflowed coefficients) must fail this check too.
    if (!(res.tail <= tolerance))
        throw ConvergenceError("NotConverged",
                               "truncation tail above requested tolerance");

    if (integer_exp) {
        int n = int(std::lround(sol.exponent.real()));
        cplx p = std::pow(w, n);
        res.value = p * s;
        res.derivative = p * ds + (n == 0 ? cplx{} : double(n) * p / w * s);
    } else {
        cplx logw{std::log(r), cut_window_arg(w, sol.branch_cut_direction)};
        cplx p = std::exp(sol.exponent * logw);
        res.value = p * s;
        res.derivative = p * (sol.exponent / w * s + ds);
    }
    if (!std::isfinite(std::abs(res.value)) ||
        !std::isfinite(std::abs(res.derivative)))
        throw ConvergenceError("NotConverged",
                               "series evaluation produced a non-finite value");
    return res;
}

EvalResult evaluate_adaptive(LocalSolution& sol, cplx z, double tolerance,
                             double safety) {
    for (;;) {
        try {
            return evaluate(sol, z, tolerance, safety);
        } catch (const ConvergenceError&) {
            int n = int(sol.coefficients.size()) - 1;
            if (n >= max_terms) throw;
            sol = extend(sol, std::min(2 * n, max_terms));
        }
    }
}

cplx wronskian(const LocalSolution& sol1, const LocalSolution& sol2, cplx z,
               double tolerance) {
    if (sol1.center != sol2.center)
        throw DomainError("CenterMismatch",
                          "Wronskian requires solutions sharing a center");
    EvalResult a = evaluate(sol1, z, tolerance);
    EvalResult b = evaluate(sol2, z, tolerance);
    return a.value * b.derivative - a.derivative * b.value;
}

double recurrence_residual(const LocalSolution& sol) {
    PolyOde ode = recentered_ode(sol.config, sol.center);
    const auto& c = sol.coefficients;
    int n_max = int(c.size()) - 1;
    double worst = 0.0;
    // Residual of the series identity sum_n K(t, n) c_n = 0, each row
    // normalized by the sum of its term magnitudes.
    for (int t = 0; t <= n_max - 2; ++t) {
        cplx acc{};
        double scale = 0.0;
        for (int n = std::max(0, t - 6); n <= std::min(n_max, t + 2); ++n) {
            double mag = 0.0;
            acc += kernel(ode, sol.exponent, t, n, &mag) * c[n];
            scale += mag * std::abs(c[n]);
        }
        if (scale > 0.0) worst = std::max(worst, std::abs(acc) / scale);
    }
    return worst;
}

std::array<cplx, 2> integrate_path(const SymmetricHeunConfig& cfg, cplx start,
                                   std::array<cplx, 2> init, cplx end,
                                   double rtol) {
    validate(cfg);
    DerivedParams dp = derived_params(cfg);
    std::array<cplx, 4> z = cfg.z;
    cplx lambda = cfg.lambda;

    auto p = [z](cplx v) {
        cplx s{};
        for (const auto& zj : z) s += 1.0 / (v - zj);
        return 0.5 * s;
    };
    auto q = [z, dp, lambda](cplx v) {
        cplx s = lambda, prod{1.0};
        for (int j = 0; j < 4; ++j) {
            s += dp.q[j] / (v - z[j]);
            prod *= v - z[j];
        }
        return s / prod;
    };

    std::vector<cplx> sing(z.begin(), z.end());
    double clearance = 0.05 * min_pairwise_distance(z);
    return detail::integrate_segment(p, q, sing, clearance, start, init, end,
                                     rtol);
}

std::array<cplx, 2> integrate_standard(const StandardHeunParams& p, cplx start,
                                       std::array<cplx, 2> init, cplx end,
                                       double rtol) {
    cplx a = p.a;
    cplx gamma = p.gamma, delta = p.delta, epsilon = p.epsilon;
    cplx ab = p.alpha * p.beta, q = p.q;

    auto pf = [=](cplx x) {
        return gamma / x + delta / (x - 1.0) + epsilon / (x - a);
    };
    auto qf = [=](cplx x) { return (ab * x - q) / (x * (x - 1.0) * (x - a)); };

    std::vector<cplx> sing{cplx{}, cplx{1.0}, a};
    double d = std::min({std::abs(a), std::abs(a - 1.0), 1.0});
    return detail::integrate_segment(pf, qf, sing, 0.05 * d, start, init, end,
                                     rtol);
}

}  // namespace heun::series
