#include <cmath>
#include <complex>
#include <string>

#include "doctest.h"
#include "heun/series.hpp"
#include "oracles.hpp"

using namespace heun;
using namespace heun::series;
using oracle::rel_err;

namespace {

const double pi = std::acos(-1.0);
const cplx I{0.0, 1.0};

template <typename Fn>
bool throws_with_tag(Fn&& f, const std::string& tag) {
    try {
        f();
    } catch (const HeunError& e) {
        return e.tag() == tag;
    }
    return false;
}

SymmetricHeunConfig quartic_config() {
    // z^4 - 1 singular set, all chi = pi/4, lambda = 1.
    SymmetricHeunConfig cfg;
    cfg.z = {cplx{1.0}, I, cplx{-1.0}, -I};
    cfg.chi = {cplx{pi / 4}, cplx{pi / 4}, cplx{pi / 4}, cplx{pi / 4}};
    cfg.lambda = 1.0;
    return cfg;
}

// Deterministic nondegenerate configs: three unit-circle points spread out,
// a fourth point placed off the circle, chi away from pi/4 multiples.
SymmetricHeunConfig random_config(oracle::Rng& rng) {
    for (;;) {
        double p1 = rng.uniform(0.0, 2.0 * pi);
        double p2 = rng.uniform(0.0, 2.0 * pi);
        SymmetricHeunConfig cfg;
        cfg.z[0] = std::polar(1.0, p1);
        cfg.z[1] = std::polar(1.0, p2);
        cfg.z[3] = 1.0;
        cfg.z[2] = rng.annulus(0.3, 2.0);
        for (auto& chi : cfg.chi) chi = cplx{rng.uniform(0.1, 0.7)};
        cfg.lambda = rng.box(2.0);
        try {
            validate(cfg);
            for (int j = 1; j <= 4; ++j) {
                auto [a, b] = indicial_exponents(cfg, j);
                if (std::abs(a - b) < 5e-2) throw DegeneracyError("retry", "");
            }
            double dmin = 1e9;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    dmin = std::min(dmin, std::abs(cfg.z[i] - cfg.z[j]));
            if (dmin < 0.25) continue;
        } catch (const HeunError&) {
            continue;
        }
        return cfg;
    }
}

// Test-side copy of the branch-window prefactor (w = z - center).
cplx pow_cut(cplx w, cplx rho, double theta) {
    double a = std::fmod(std::arg(w) - theta, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    return std::exp(rho * cplx{std::log(std::abs(w)), theta + a});
}

}  // namespace

TEST_CASE("derived_params: fixed examples") {
    SymmetricHeunConfig cfg = quartic_config();
    for (auto& chi : cfg.chi) chi = cplx{};
    DerivedParams dp = derived_params(cfg);
    for (int j = 0; j < 4; ++j) {
        CHECK(dp.alpha[j] == cplx{0.5});
        CHECK(dp.beta[j] == cplx{});
        CHECK(std::abs(dp.q[j]) == 0.0);
    }

    // chi = pi/4: alpha = beta = 1/4, P'(z_j) = 4 z_j^3, q_j = z_j^3 / 4.
    cfg = quartic_config();
    dp = derived_params(cfg);
    for (int j = 0; j < 4; ++j) {
        CHECK(rel_err(dp.alpha[j], 0.25) < 1e-15);
        CHECK(rel_err(dp.beta[j], 0.25) < 1e-15);
        cplx zj = cfg.z[j];
        CHECK(rel_err(dp.q[j], zj * zj * zj / 4.0) < 2e-15);
    }
}

TEST_CASE("derived_params: exponent sum is 2 exactly for real chi") {
    oracle::Rng rng(111000);
    for (int it = 0; it < 200; ++it) {
        SymmetricHeunConfig cfg = random_config(rng);
        DerivedParams dp = derived_params(cfg);
        cplx sum{};
        for (int j = 0; j < 4; ++j) sum += dp.alpha[j] + dp.beta[j];
        CHECK(sum.real() == 2.0);
        CHECK(sum.imag() == 0.0);
    }
}

TEST_CASE("indicial_exponents: quadratic-root oracle") {
    auto check_roots = [](const SymmetricHeunConfig& cfg) {
        for (int j = 1; j <= 4; ++j) {
            auto [a, b] = indicial_exponents(cfg, j);
            auto roots = oracle::quadratic_roots(cplx{-0.5}, a * b);
            double d1 = std::abs(roots[0] - a) + std::abs(roots[1] - b);
            double d2 = std::abs(roots[0] - b) + std::abs(roots[1] - a);
            CHECK(std::min(d1, d2) <= 1e-14);
        }
    };
    check_roots(quartic_config());
    oracle::Rng rng(2211);
    for (int it = 0; it < 50; ++it) check_roots(random_config(rng));

    SymmetricHeunConfig cfg = quartic_config();
    for (auto& chi : cfg.chi) chi = cplx{};
    auto [a0, b0] = indicial_exponents(cfg, 1);
    CHECK(a0 == cplx{0.5});
    CHECK(b0 == cplx{});
    for (auto& chi : cfg.chi) chi = cplx{pi / 2};
    auto [a1, b1] = indicial_exponents(cfg, 2);
    CHECK(std::abs(a1) < 1e-30);
    CHECK(std::abs(b1 - 0.5) < 1e-30);
}

TEST_CASE("taylor_solution: c2 example and initial data") {
    SymmetricHeunConfig cfg = quartic_config();
    LocalSolution sol = taylor_solution(cfg, cplx{}, 1.0, 0.0);
    REQUIRE(sol.coefficients.size() >= 3);
    CHECK(sol.coefficients[0] == cplx{1.0});
    CHECK(sol.coefficients[1] == cplx{});
    CHECK(rel_err(sol.coefficients[2], 0.5) < 1e-14);
    CHECK(sol.conv_radius == doctest::Approx(1.0));

    LocalSolution slope = taylor_solution(cfg, cplx{}, 0.0, 1.0);
    CHECK(slope.coefficients[0] == cplx{});
    CHECK(slope.coefficients[1] == cplx{1.0});

    EvalResult at_center = evaluate(sol, cplx{});
    CHECK(at_center.value == cplx{1.0});
    CHECK(at_center.derivative == cplx{});
}

TEST_CASE("taylor_solution: zero potential keeps constants constant") {
    SymmetricHeunConfig cfg = quartic_config();
    for (auto& chi : cfg.chi) chi = cplx{};  // beta_j = 0 -> q_j = 0
    cfg.lambda = 0.0;
    LocalSolution sol = taylor_solution(cfg, cplx{0.2, 0.1}, 1.0, 0.0, 32);
    for (std::size_t n = 1; n < sol.coefficients.size(); ++n)
        CHECK(std::abs(sol.coefficients[n]) < 1e-14);
}

TEST_CASE("taylor_solution: singular center rejected") {
    CHECK(throws_with_tag(
        [] { taylor_solution(quartic_config(), cplx{1.0}, 1.0, 0.0); },
        "CenterIsSingular"));
}

TEST_CASE("recurrence residual stays small for both kinds") {
    oracle::Rng rng(333444);
    for (int it = 0; it < 25; ++it) {
        SymmetricHeunConfig cfg = random_config(rng);
        LocalSolution t = taylor_solution(cfg, cplx{}, rng.box(1.0), rng.box(1.0));
        CHECK(recurrence_residual(t) <= 1e-12);
        LocalSolution f = frobenius_solution(cfg, 1 + (it % 4), Branch::first);
        CHECK(recurrence_residual(f) <= 1e-12);
    }
}

TEST_CASE("frobenius_solution: normalization, exponents, degeneracy") {
    oracle::Rng rng(987654);
    SymmetricHeunConfig cfg = random_config(rng);
    for (int j = 1; j <= 4; ++j) {
        auto [a, b] = indicial_exponents(cfg, j);
        LocalSolution first = frobenius_solution(cfg, j, Branch::first);
        CHECK(first.coefficients[0] == cplx{1.0});
        CHECK(first.exponent == a);
        CHECK(first.center == cfg.z[j - 1]);
        LocalSolution second = frobenius_solution(cfg, j, Branch::second);
        CHECK(second.exponent == b);
    }

    CHECK(throws_with_tag(
        [] { frobenius_solution(quartic_config(), 1, Branch::first); },
        "DegenerateExponents"));
}

TEST_CASE("frobenius_solution: asymptotic ratio near the center") {
    oracle::Rng rng(13579);
    for (int it = 0; it < 10; ++it) {
        SymmetricHeunConfig cfg = random_config(rng);
        int j = 1 + (it % 4);
        LocalSolution sol = frobenius_solution(cfg, j, Branch::first);
        // Approach radially inward (opposite the outward cut ray).
        cplx w = -1e-3 * cfg.z[j - 1] / std::abs(cfg.z[j - 1]);
        EvalResult r = evaluate(sol, cfg.z[j - 1] + w);
        cplx ratio = r.value / pow_cut(w, sol.exponent, sol.branch_cut_direction);
        CHECK(std::abs(ratio - 1.0) <= 1e-2);
    }
}

TEST_CASE("evaluate: domain errors") {
    SymmetricHeunConfig cfg = quartic_config();
    LocalSolution sol = taylor_solution(cfg, cplx{}, 1.0, 0.0);
    CHECK(throws_with_tag([&] { evaluate(sol, cplx{0.96}); }, "OutsideDisc"));

    oracle::Rng rng(24680);
    SymmetricHeunConfig rc = random_config(rng);
    LocalSolution f = frobenius_solution(rc, 1, Branch::first);
    // A point on the outward radial ray lies on the default cut.
    cplx on_cut = rc.z[0] * 1.02;
    CHECK(throws_with_tag([&] { evaluate(f, on_cut); }, "OnBranchCut"));
    // The branch point itself.
    CHECK(throws_with_tag([&] { evaluate(f, rc.z[0]); }, "OnBranchCut"));
}

TEST_CASE("evaluate: truncation tail and adaptive rescue") {
    oracle::Rng rng(1122);
    SymmetricHeunConfig cfg = random_config(rng);
    LocalSolution coarse = taylor_solution(cfg, cplx{}, 1.0, 0.3, 6);
    cplx z = 0.85 * coarse.conv_radius * std::polar(1.0, 0.4);
    CHECK(throws_with_tag([&] { evaluate(coarse, z, 1e-10); }, "NotConverged"));

    LocalSolution adaptive = coarse;
    EvalResult r = evaluate_adaptive(adaptive, z, 1e-10);
    CHECK(r.tail <= 1e-10);
    CHECK(adaptive.coefficients.size() > coarse.coefficients.size());

    // The adaptive result matches a directly oversampled series.
    LocalSolution fine = taylor_solution(cfg, cplx{}, 1.0, 0.3, 512);
    EvalResult rf = evaluate(fine, z, 1e-9);
    CHECK(rel_err(r.value, rf.value) < 1e-10);
}

TEST_CASE("integrate_path: trivial and reversibility") {
    SymmetricHeunConfig cfg = quartic_config();
    std::array<cplx, 2> init{cplx{1.0, -0.5}, cplx{0.25, 2.0}};
    auto same = integrate_path(cfg, cplx{0.1}, init, cplx{0.1});
    CHECK(same[0] == init[0]);
    CHECK(same[1] == init[1]);

    cplx a{-0.2, 0.1}, b{0.35, -0.3};
    auto fwd = integrate_path(cfg, a, init, b);
    auto back = integrate_path(cfg, b, fwd, a);
    CHECK(rel_err(back[0], init[0]) <= 1e-10);
    CHECK(rel_err(back[1], init[1]) <= 1e-10);
}

TEST_CASE("integrate_path: clearance guard") {
    SymmetricHeunConfig cfg = quartic_config();
    CHECK(throws_with_tag(
        [&] {
            integrate_path(cfg, cplx{0.0}, {cplx{1.0}, cplx{}}, cplx{2.0});
        },
        "PathTooCloseToSingularity"));
}

TEST_CASE("series vs integration: Taylor solutions") {
    oracle::Rng rng(555777);
    for (int it = 0; it < 10; ++it) {
        SymmetricHeunConfig cfg = random_config(rng);
        cplx c0 = rng.box(1.0), c1 = rng.box(1.0);
        if (std::abs(c0) < 0.1) c0 += 0.5;
        LocalSolution sol = taylor_solution(cfg, cplx{}, c0, c1, 96);
        for (double frac : {0.3, 0.5}) {
            cplx z = frac * sol.conv_radius * std::polar(1.0, rng.uniform(0.0, 2.0 * pi));
            EvalResult se = evaluate(sol, z, 1e-11);
            auto oi = integrate_path(cfg, cplx{}, {c0, c1}, z);
            CHECK(rel_err(se.value, oi[0]) <= 1e-8);
            CHECK(oracle::rel_err_floor(se.derivative, oi[1], std::abs(oi[0])) <=
                  1e-8);
        }
    }
}

TEST_CASE("series vs integration: Frobenius solutions") {
    oracle::Rng rng(606060);
    int done = 0;
    for (int it = 0; done < 12; ++it) {
        REQUIRE(it < 100);
        SymmetricHeunConfig cfg = random_config(rng);
        int j = 1 + (it % 4);
        LocalSolution sol = frobenius_solution(cfg, j, Branch::first, 96);
        cplx zj = cfg.z[j - 1];
        // Two inward-pointing rays, clear of the outward cut.
        double base = std::arg(-zj);
        cplx w1 = 0.5 * sol.conv_radius * std::polar(1.0, base + 0.15);
        cplx w2 = 0.3 * sol.conv_radius * std::polar(1.0, base - 0.15);
        EvalResult s1 = evaluate(sol, zj + w1, 1e-11);
        EvalResult s2 = evaluate(sol, zj + w2, 1e-11);
        std::array<cplx, 2> init{s1.value, s1.derivative};
        std::array<cplx, 2> got;
        try {
            got = integrate_path(cfg, zj + w1, init, zj + w2);
        } catch (const DomainError&) {
            continue;  // segment clipped another singular point's clearance
        }
        CHECK(oracle::rel_err_floor(s2.value, got[0],
                                    0.1 * std::abs(got[1]) + 1e-30) <= 1e-8);
        CHECK(oracle::rel_err_floor(s2.derivative, got[1],
                                    0.1 * std::abs(got[0]) + 1e-30) <= 1e-8);
        ++done;
    }
}

TEST_CASE("wronskian: canonical pair and Abel identity") {
    oracle::Rng rng(778899);
    SymmetricHeunConfig cfg = random_config(rng);
    LocalSolution f1 = taylor_solution(cfg, cplx{}, 1.0, 0.0, 96);
    LocalSolution f2 = taylor_solution(cfg, cplx{}, 0.0, 1.0, 96);
    CHECK(wronskian(f1, f2, cplx{}) == cplx{1.0});

    auto pz = [&](cplx z) {
        cplx prod{1.0};
        for (const auto& zj : cfg.z) prod *= z - zj;
        return prod;
    };
    // W(z) sqrt(P(z)) has constant modulus; check drift across the disc.
    cplx za = 0.15 * f1.conv_radius * std::polar(1.0, 0.3);
    cplx zb = 0.45 * f1.conv_radius * std::polar(1.0, 1.1);
    cplx wa = wronskian(f1, f2, za) * std::sqrt(pz(za));
    cplx wb = wronskian(f1, f2, zb) * std::sqrt(pz(zb));
    CHECK(std::abs(std::abs(wa / wb) - 1.0) <= 1e-8);

    // Proportional solutions have zero Wronskian.
    LocalSolution f3 = taylor_solution(cfg, cplx{}, 2.0, 0.0, 96);
    cplx w0 = wronskian(f1, f3, za);
    CHECK(std::abs(w0) <= 1e-12);

    LocalSolution other = taylor_solution(cfg, cplx{0.01}, 1.0, 0.0);
    CHECK(throws_with_tag([&] { wronskian(f1, other, cplx{}); },
                          "CenterMismatch"));
}

TEST_CASE("standard_form_map: parameter identities") {
    oracle::Rng rng(192837);
    for (int it = 0; it < 15; ++it) {
        SymmetricHeunConfig cfg = random_config(rng);
        StandardFormMap map = standard_form_map(cfg);
        DerivedParams dp = derived_params(cfg);

        cplx a = geometry::cross_ratio(cfg.z[0], cfg.z[1], cfg.z[2], cfg.z[3]);
        CHECK(rel_err(map.params.a, a) <= 1e-14);
        CHECK(map.nu[1] == dp.alpha[1]);

        cplx fuchs = map.params.gamma + map.params.delta + map.params.epsilon -
                     map.params.alpha - map.params.beta - 1.0;
        CHECK(std::abs(fuchs) <= 1e-12);

        // The moebius member sends the points to (0, 1, a, infinity).
        using geometry::moebius_apply;
        CHECK(std::abs(moebius_apply(map.moebius, cfg.z[0]).value) <= 1e-12);
        CHECK(std::abs(moebius_apply(map.moebius, cfg.z[1]).value - 1.0) <= 1e-12);
        CHECK(rel_err(moebius_apply(map.moebius, cfg.z[2]).value, a) <= 1e-12);
    }
}

TEST_CASE("integrate_standard: trivial and gamma-branch growth") {
    oracle::Rng rng(456123);
    SymmetricHeunConfig cfg = random_config(rng);
    StandardFormMap map = standard_form_map(cfg);
    const StandardHeunParams& p = map.params;

    std::array<cplx, 2> init{cplx{0.7, 0.2}, cplx{-0.1, 0.4}};
    auto same = integrate_standard(p, cplx{0.3}, init, cplx{0.3});
    CHECK(same[0] == init[0]);

    // Round trip.
    cplx xa{0.4, 0.25}, xb{0.55, -0.1};
    bool clear = true;
    std::array<cplx, 2> fwd{}, back{};
    try {
        fwd = integrate_standard(p, xa, init, xb);
        back = integrate_standard(p, xb, fwd, xa);
    } catch (const DomainError&) {
        clear = false;
    }
    if (clear) {
        CHECK(rel_err(back[0], init[0]) <= 1e-10);
        CHECK(rel_err(back[1], init[1]) <= 1e-10);
    }

    // Near x = 0 the second local exponent is 1 - gamma: start on that
    // branch and check the continued solution tracks x^{1-gamma}.
    cplx e = 1.0 - p.gamma;
    double x0 = 5e-3;
    if (std::abs(p.a) > 0.1 && std::abs(p.a.imag()) > 0.05) {
        std::array<cplx, 2> binit{std::pow(cplx{x0}, e),
                                  e * std::pow(cplx{x0}, e - 1.0)};
        auto grown = integrate_standard(p, cplx{x0}, binit, cplx{2.0 * x0});
        cplx expect = std::pow(cplx{2.0 * x0}, e);
        CHECK(std::abs(grown[0] / expect - 1.0) <= 0.1);
    }
}

TEST_CASE("standard-form conjugacy: series transported to the HeunG side") {
    oracle::Rng rng(31415);
    int done = 0;
    for (int it = 0; done < 3; ++it) {
        REQUIRE(it < 40);
        SymmetricHeunConfig cfg = random_config(rng);
        StandardFormMap map = standard_form_map(cfg);

        LocalSolution sol = taylor_solution(cfg, cplx{}, 1.0, 0.4 * I, 96);
        double r0 = sol.conv_radius;

        cplx zs = 0.12 * r0 * std::polar(1.0, 0.7);
        cplx zt = 0.34 * r0 * std::polar(1.0, 2.1);

        // Branch-tracked prefactor G = prod (z - z_k)^{nu_k} along the
        // segment zs -> zt, starting from principal logs at zs.
        auto log_g = [&](cplx z) {
            cplx s{};
            for (int k = 0; k < 4; ++k) s += map.nu[k] * std::log(z - cfg.z[k]);
            return s;
        };
        auto l1 = [&](cplx z) {
            cplx s{};
            for (int k = 0; k < 4; ++k) s += map.nu[k] / (z - cfg.z[k]);
            return s;
        };
        int steps = 24;
        cplx log_gt = log_g(zs);
        for (int i = 0; i < steps; ++i) {
            cplx a = zs + (zt - zs) * (double(i) / steps);
            cplx b = zs + (zt - zs) * (double(i + 1) / steps);
            for (int k = 0; k < 4; ++k)
                log_gt += map.nu[k] * std::log((b - cfg.z[k]) / (a - cfg.z[k]));
        }

        EvalResult fs = evaluate(sol, zs, 1e-11);
        EvalResult ft = evaluate(sol, zt, 1e-11);

        cplx gs = std::exp(log_g(zs)), gt = std::exp(log_gt);
        cplx xs = (map.moebius.a_coef * zs + map.moebius.b_coef) /
                  (map.moebius.c_coef * zs + map.moebius.d_coef);
        cplx xt = (map.moebius.a_coef * zt + map.moebius.b_coef) /
                  (map.moebius.c_coef * zt + map.moebius.d_coef);
        cplx den = map.moebius.c_coef * zs + map.moebius.d_coef;
        cplx dxs = map.moebius.det() / (den * den);

        std::array<cplx, 2> hinit{fs.value / gs,
                                  (fs.derivative - fs.value * l1(zs)) / (gs * dxs)};

        // Integrate the standard form along the image polyline of zs -> zt.
        std::array<cplx, 2> h = hinit;
        bool ok = true;
        try {
            for (int i = 0; i < steps; ++i) {
                cplx a = zs + (zt - zs) * (double(i) / steps);
                cplx b = zs + (zt - zs) * (double(i + 1) / steps);
                cplx xa = (map.moebius.a_coef * a + map.moebius.b_coef) /
                          (map.moebius.c_coef * a + map.moebius.d_coef);
                cplx xb = (map.moebius.a_coef * b + map.moebius.b_coef) /
                          (map.moebius.c_coef * b + map.moebius.d_coef);
                h = integrate_standard(map.params, xa, h, xb);
            }
        } catch (const HeunError&) {
            ok = false;  // image path clipped the standard singular set
        }
        if (!ok) continue;
        (void)xs;
        (void)xt;

        cplx f_pred = h[0] * gt;
        CHECK(rel_err(f_pred, ft.value) <= 1e-6);
        ++done;
    }
}
