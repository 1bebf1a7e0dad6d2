#include "heun/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace heun::geometry {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double reduce_angle(double p) {
    double r = std::fmod(p, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

cplx det3(const std::array<cplx, 9>& m) {
    return m[0] * (m[4] * m[8] - m[5] * m[7])
         - m[1] * (m[3] * m[8] - m[5] * m[6])
         + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double triple_scale(cplx a, cplx b, cplx c) {
    return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

void require_distinct(const std::array<cplx, 3>& t, const char* tag) {
    double s = std::max(1.0, triple_scale(t[0], t[1], t[2]));
    if (std::abs(t[0] - t[1]) <= 1e-13 * s || std::abs(t[1] - t[2]) <= 1e-13 * s ||
        std::abs(t[0] - t[2]) <= 1e-13 * s)
        throw DegeneracyError(tag, "triple contains a repeated point");
}

}  // namespace

AngleTriple::AngleTriple(double p1, double p2, double p4)
    : phi1(reduce_angle(p1)), phi2(reduce_angle(p2)), phi4(reduce_angle(p4)) {}

double AngleTriple::chord(int k, int l) const {
    auto pick = [this](int i) {
        switch (i) {
            case 1: return phi1;
            case 2: return phi2;
            case 4: return phi4;
        }
        throw DomainError("BadIndex", "angle index must be 1, 2 or 4");
    };
    return 2.0 * std::abs(std::sin(0.5 * (pick(k) - pick(l))));
}

std::array<cplx, 3> AngleTriple::points() const {
    return {std::polar(1.0, phi1), std::polar(1.0, phi2), std::polar(1.0, phi4)};
}

Circle circumcircle(cplx zk, cplx zl, cplx zm) {
    double s = triple_scale(zk, zl, zm);
    if (s == 0.0 || std::abs(zk - zl) <= 1e-14 * s || std::abs(zl - zm) <= 1e-14 * s ||
        std::abs(zm - zk) <= 1e-14 * s)
        throw DegeneracyError("Coincident", "two of the three points coincide");

    cplx den = std::conj(zk) * (zl - zm) + std::conj(zl) * (zm - zk) +
               std::conj(zm) * (zk - zl);
    if (std::abs(den) < 1e-13 * s * s)
        throw DegeneracyError("Collinear", "the three points lie on a line");

    cplx num = std::norm(zk) * (zl - zm) + std::norm(zl) * (zm - zk) +
               std::norm(zm) * (zk - zl);
    cplx center = num / den;
    double radius =
        std::abs(zk - zl) * std::abs(zl - zm) * std::abs(zm - zk) / std::abs(den);
    return {center, radius};
}

MoebiusMap moebius_from_triples(const std::array<cplx, 3>& src,
                                const std::array<cplx, 3>& dst) {
    require_distinct(src, "DegenerateTriple");
    require_distinct(dst, "DegenerateTriple");

    // Nullspace of the rows (z_k, 1, -z_k w_k, -w_k) via column-deleted
    // 3x3 determinants, signs folded into the deleted columns.
    const auto& z = src;
    const auto& w = dst;
    std::array<cplx, 9> m1{}, m2{}, m3{}, m4{};
    for (int k = 0; k < 3; ++k) {
        m1[3 * k] = 1.0;     m1[3 * k + 1] = z[k] * w[k];  m1[3 * k + 2] = w[k];
        m2[3 * k] = z[k];    m2[3 * k + 1] = z[k] * w[k];  m2[3 * k + 2] = w[k];
        m3[3 * k] = z[k];    m3[3 * k + 1] = 1.0;          m3[3 * k + 2] = w[k];
        m4[3 * k] = z[k];    m4[3 * k + 1] = 1.0;          m4[3 * k + 2] = z[k] * w[k];
    }
    MoebiusMap map{-det3(m1), det3(m2), det3(m3), -det3(m4)};

    double cs = std::max({std::abs(map.a_coef), std::abs(map.b_coef),
                          std::abs(map.c_coef), std::abs(map.d_coef)});
    if (cs == 0.0 || std::abs(map.det()) <= 1e-14 * cs * cs)
        throw DegeneracyError("DegenerateTriple", "interpolation map is singular");
    return map;
}

ExtendedPoint moebius_apply(const MoebiusMap& m, const ExtendedPoint& z) {
    double cs = std::max({std::abs(m.a_coef), std::abs(m.b_coef),
                          std::abs(m.c_coef), std::abs(m.d_coef)});
    if (z.infinite) {
        if (std::abs(m.c_coef) <= 1e-14 * cs) return ExtendedPoint::at_infinity();
        return {m.a_coef / m.c_coef};
    }
    cplx den = m.c_coef * z.value + m.d_coef;
    if (std::abs(den) <= 1e-14 * cs * std::max(1.0, std::abs(z.value)))
        return ExtendedPoint::at_infinity();
    return {(m.a_coef * z.value + m.b_coef) / den};
}

MoebiusMap moebius_inverse(const MoebiusMap& m) {
    return {m.d_coef, -m.b_coef, -m.c_coef, m.a_coef};
}

MoebiusMap moebius_compose(const MoebiusMap& m2, const MoebiusMap& m1) {
    return {m2.a_coef * m1.a_coef + m2.b_coef * m1.c_coef,
            m2.a_coef * m1.b_coef + m2.b_coef * m1.d_coef,
            m2.c_coef * m1.a_coef + m2.d_coef * m1.c_coef,
            m2.c_coef * m1.b_coef + m2.d_coef * m1.d_coef};
}

MoebiusMap canonical_map(cplx z1, cplx z2, cplx z4) {
    require_distinct({z1, z2, z4}, "DegenerateTriple");
    cplx k = (z2 - z4) / (z2 - z1);
    return {k, -k * z1, 1.0, -z4};
}

cplx cross_ratio(cplx z1, cplx z2, cplx z3, cplx z4) {
    std::array<cplx, 4> zs{z1, z2, z3, z4};
    double s = 1.0;
    for (const auto& z : zs) s = std::max(s, std::abs(z));
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(zs[i] - zs[j]) <= 1e-13 * s)
                throw DegeneracyError("DegeneratePoints",
                                      "cross-ratio needs four distinct points");
    return ((z2 - z4) * (z3 - z1)) / ((z2 - z1) * (z3 - z4));
}

namespace {

// Map sending p -> 0, q -> 1, r -> infinity; at most one of them infinite.
MoebiusMap canonical_ext(const ExtendedPoint& p, const ExtendedPoint& q,
                         const ExtendedPoint& r) {
    int n_inf = int(p.infinite) + int(q.infinite) + int(r.infinite);
    if (n_inf > 1)
        throw DegeneracyError("DegenerateTriple",
                              "triple contains the point at infinity twice");
    if (p.infinite) return {0.0, q.value - r.value, 1.0, -r.value};
    if (q.infinite) return {1.0, -p.value, 1.0, -r.value};
    if (r.infinite) return {1.0, -p.value, 0.0, q.value - p.value};
    return canonical_map(p.value, q.value, r.value);
}

void require_distinct_ext(const std::array<ExtendedPoint, 3>& t) {
    std::array<cplx, 3> finite{};
    int n = 0;
    for (const auto& e : t)
        if (!e.infinite) finite[n++] = e.value;
    double s = 1.0;
    for (int i = 0; i < n; ++i) s = std::max(s, std::abs(finite[i]));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(finite[i] - finite[j]) <= 1e-13 * s)
                throw DegeneracyError("DegenerateTriple",
                                      "triple contains a repeated point");
}

}  // namespace

MoebiusMap moebius_from_triples_ext(const std::array<ExtendedPoint, 3>& src,
                                    const std::array<ExtendedPoint, 3>& dst) {
    require_distinct_ext(src);
    require_distinct_ext(dst);
    MoebiusMap to_canon = canonical_ext(src[0], src[1], src[2]);
    MoebiusMap from_canon = moebius_inverse(canonical_ext(dst[0], dst[1], dst[2]));
    MoebiusMap map = moebius_compose(from_canon, to_canon);
    double cs = std::max({std::abs(map.a_coef), std::abs(map.b_coef),
                          std::abs(map.c_coef), std::abs(map.d_coef)});
    if (cs == 0.0 || std::abs(map.det()) <= 1e-14 * cs * cs)
        throw DegeneracyError("DegenerateTriple", "interpolation map is singular");
    return map;
}

UnitCircleMaps unit_circle_maps(const AngleTriple& phis) {
    double s12 = std::sin(0.5 * (phis.phi1 - phis.phi2));
    double s14 = std::sin(0.5 * (phis.phi1 - phis.phi4));
    double c14 = std::cos(0.5 * (phis.phi1 - phis.phi4));
    double s42 = std::sin(0.5 * (phis.phi4 - phis.phi2));
    if (std::abs(s12) < 1e-12 || std::abs(s14) < 1e-12 || std::abs(s42) < 1e-12)
        throw DegeneracyError("DegenerateAngles", "two angles coincide mod 2pi");

    cplx zeta0{c14 * s42 / s12, s14 * s42 / s12};
    cplx e1 = std::polar(1.0, phis.phi1);
    cplx e4 = std::polar(1.0, phis.phi4);
    cplx k = std::conj(zeta0);

    UnitCircleMaps out;
    out.zeta0 = zeta0;
    out.forward = {k, -k * e1, 1.0, -e4};
    out.inverse = {e4, -e4 * zeta0, 1.0, -std::conj(zeta0)};
    return out;
}

MoebiusMap unit_circle_coeffs(const AngleTriple& phis,
                              const std::array<cplx, 3>& points) {
    double s12 = std::sin(0.5 * (phis.phi1 - phis.phi2));
    double s14 = std::sin(0.5 * (phis.phi1 - phis.phi4));
    double s42 = std::sin(0.5 * (phis.phi4 - phis.phi2));
    if (std::abs(s12) < 1e-12 || std::abs(s14) < 1e-12 || std::abs(s42) < 1e-12)
        throw DegeneracyError("DegenerateAngles", "two angles coincide mod 2pi");
    require_distinct(points, "DegenerateTriple");

    cplx p1 = points[0], p2 = points[1], p4 = points[2];
    cplx e12 = std::polar(1.0, phis.phi1 + phis.phi2);
    cplx e14 = std::polar(1.0, phis.phi1 + phis.phi4);
    cplx e24 = std::polar(1.0, phis.phi2 + phis.phi4);
    cplx e1 = std::polar(1.0, phis.phi1);
    cplx e2 = std::polar(1.0, phis.phi2);
    cplx e4 = std::polar(1.0, phis.phi4);

    MoebiusMap map;
    map.a_coef = (p1 - p2) * e12 - (p1 - p4) * e14 + (p2 - p4) * e24;
    map.b_coef = -p4 * (p1 - p2) * e12 + p2 * (p1 - p4) * e14 - p1 * (p2 - p4) * e24;
    map.c_coef = -(p1 - p2) * e4 + (p1 - p4) * e2 - (p2 - p4) * e1;
    map.d_coef = p4 * (p1 - p2) * e4 - p2 * (p1 - p4) * e2 + p1 * (p2 - p4) * e1;

    double cs = std::max({std::abs(map.a_coef), std::abs(map.b_coef),
                          std::abs(map.c_coef), std::abs(map.d_coef)});
    if (cs == 0.0 || std::abs(map.det()) <= 1e-14 * cs * cs)
        throw DegeneracyError("DegenerateTriple", "interpolation map is singular");
    return map;
}

}  // namespace heun::geometry
