#pragma once

// Test-side oracles and deterministic generators. Everything here is
// independent of the library implementation so that agreement between the
// two is evidence, not tautology.

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "heun/geometry.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline double rel_err(cplx got, cplx want) {
    double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

inline double rel_err_floor(cplx got, cplx want, double floor_scale) {
    double scale = std::max(std::abs(want), floor_scale);
    return std::abs(got - want) / scale;
}

// Deterministic generators, seeded per test site.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen);
    }
    cplx box(double half_width) {
        return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
    }
    cplx annulus(double r_lo, double r_hi) {
        double r = uniform(r_lo, r_hi);
        double t = uniform(0.0, 6.283185307179586);
        return std::polar(r, t);
    }
};

// Circumcenter via perpendicular bisectors: solve the real 2x2 system
//   (c - (p+q)/2) . (q - p) = 0,  (c - (q+r)/2) . (r - q) = 0.
// Different route than the conjugate-determinant formula under test.
inline cplx circumcenter_bisector(cplx p, cplx q, cplx r) {
    double a11 = q.real() - p.real(), a12 = q.imag() - p.imag();
    double a21 = r.real() - q.real(), a22 = r.imag() - q.imag();
    double b1 = 0.5 * (std::norm(q) - std::norm(p));
    double b2 = 0.5 * (std::norm(r) - std::norm(q));
    double det = a11 * a22 - a12 * a21;
    return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det};
}

// Roots of x^2 + bx + c = 0 with complex coefficients, stable form.
inline std::array<cplx, 2> quadratic_roots(cplx b, cplx c) {
    cplx disc = std::sqrt(b * b - 4.0 * c);
    cplx r1 = (std::abs(-b + disc) > std::abs(-b - disc)) ? (-b + disc) / 2.0
                                                          : (-b - disc) / 2.0;
    if (std::abs(r1) == 0.0) return {cplx{0.0}, -b};
    return {r1, c / r1};
}

// Projective distance between Moebius maps: scale m2 onto m1 via the largest
// coefficient of m1, then compare coefficientwise.
inline double moebius_proj_dist(const heun::geometry::MoebiusMap& m1,
                                const heun::geometry::MoebiusMap& m2) {
    std::array<cplx, 4> u{m1.a_coef, m1.b_coef, m1.c_coef, m1.d_coef};
    std::array<cplx, 4> v{m2.a_coef, m2.b_coef, m2.c_coef, m2.d_coef};
    int imax = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
    if (std::abs(u[imax]) == 0.0) return 1.0;
    cplx s = v[imax] / u[imax];
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
        num = std::max(num, std::abs(u[i] * s - v[i]));
        den = std::max(den, std::abs(v[i]));
    }
    return num / std::max(den, 1e-300);
}

}  // namespace oracle
