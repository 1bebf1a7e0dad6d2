#pragma once

#include <array>
#include <complex>

#include "heun/errors.hpp"

namespace heun::geometry {

using cplx = std::complex<double>;

// A point of the extended complex plane.
struct ExtendedPoint {
    cplx value{};
    bool infinite = false;

    static ExtendedPoint at_infinity() { return ExtendedPoint(cplx{}, true); }
    ExtendedPoint() = default;
    ExtendedPoint(cplx v, bool inf = false) : value(v), infinite(inf) {}
    ExtendedPoint(double v) : value(v) {}
};

struct Circle {
    cplx center;
    double radius = 0.0;
};

// Fractional-linear map z -> (a z + b) / (c z + d). Coefficients are stored
// unnormalized; two maps are the same iff their coefficients are proportional.
struct MoebiusMap {
    cplx a_coef, b_coef, c_coef, d_coef;

    cplx det() const { return a_coef * d_coef - b_coef * c_coef; }
    static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

// Angles of three unit-circle points e^{i phi}, reduced mod 2pi on construction.
struct AngleTriple {
    double phi1 = 0.0, phi2 = 0.0, phi4 = 0.0;

    AngleTriple() = default;
    AngleTriple(double p1, double p2, double p4);

    // chord length between unit-circle points k and l: 2|sin((phi_k - phi_l)/2)|
    double chord(int k, int l) const;

    std::array<cplx, 3> points() const;  // e^{i phi_1}, e^{i phi_2}, e^{i phi_4}
};

// Circle through three points. The center is the standard conjugate-linear
// ratio, the radius the chord-product form; both share one denominator whose
// vanishing signals collinearity.
// Errors: DegeneracyError("Coincident"), DegeneracyError("Collinear").
Circle circumcircle(cplx zk, cplx zl, cplx zm);

// The unique Moebius map sending src_i -> dst_i, built from the 3x3 cofactor
// determinants of the incidence system. All six points must be finite; see
// moebius_from_triples_ext for triples containing the point at infinity.
// Errors: DegeneracyError("DegenerateTriple").
MoebiusMap moebius_from_triples(const std::array<cplx, 3>& src,
                                const std::array<cplx, 3>& dst);

// Same map, allowing at most one infinite point per triple (limit formulas).
MoebiusMap moebius_from_triples_ext(const std::array<ExtendedPoint, 3>& src,
                                    const std::array<ExtendedPoint, 3>& dst);

// Extended-plane application: z = -d/c -> infinity, infinity -> a/c
// (infinity when c = 0). Total, never throws on valid maps.
ExtendedPoint moebius_apply(const MoebiusMap& m, const ExtendedPoint& z);

MoebiusMap moebius_inverse(const MoebiusMap& m);

// Composition: apply(compose(m2, m1), z) = apply(m2, apply(m1, z)).
MoebiusMap moebius_compose(const MoebiusMap& m2, const MoebiusMap& m1);

// The map sending z1 -> 0, z2 -> 1, z4 -> infinity:
//   zeta(z) = ((z2 - z4)/(z2 - z1)) * ((z - z1)/(z - z4)).
// Errors: DegeneracyError("DegenerateTriple").
MoebiusMap canonical_map(cplx z1, cplx z2, cplx z4);

// a = ((z2 - z4)(z3 - z1)) / ((z2 - z1)(z3 - z4)); equals canonical_map
// applied to z3 and is invariant under Moebius maps of all four arguments.
// Errors: DegeneracyError("DegeneratePoints").
cplx cross_ratio(cplx z1, cplx z2, cplx z3, cplx z4);

struct UnitCircleMaps {
    MoebiusMap forward;   // e^{i phi_1} -> 0, e^{i phi_2} -> 1, e^{i phi_4} -> inf
    MoebiusMap inverse;   // zeta -> e^{i phi_4} (zeta - zeta0) / (zeta - conj zeta0)
    cplx zeta0;           // x0 + i y0 with x0 = c14 s42 / s12, y0 = s14 s42 / s12
};

// Canonical maps for a unit-circle triple. Verified convention: the forward
// map sends the origin to zeta0 itself (not its conjugate); equivalently the
// inverse map sends zeta0 -> 0. Errors: DegeneracyError("DegenerateAngles").
UnitCircleMaps unit_circle_maps(const AngleTriple& phis);

// Closed-form coefficients of the map sending three given points onto the
// unit-circle positions e^{i phi_1}, e^{i phi_2}, e^{i phi_4}. Proportional to
// moebius_from_triples(points, unit points); kept separate because the
// half-angle structure of the unit-circle targets gives a direct formula.
// Errors: DegeneracyError("DegenerateAngles"), DegeneracyError("DegenerateTriple").
MoebiusMap unit_circle_coeffs(const AngleTriple& phis,
                              const std::array<cplx, 3>& points);

}  // namespace heun::geometry
