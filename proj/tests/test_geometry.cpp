#include <cmath>
#include <complex>
#include <string>

#include "doctest.h"
#include "heun/geometry.hpp"
#include "oracles.hpp"

using namespace heun;
using namespace heun::geometry;
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
}  // namespace

TEST_CASE("circumcircle: fixed examples") {
    Circle c = circumcircle(0.0, 1.0, 1.0 + I);
    CHECK(std::abs(c.center - cplx{0.5, 0.5}) < 1e-15);
    CHECK(c.radius == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

    Circle u = circumcircle(1.0, I, -1.0);
    CHECK(std::abs(u.center) < 1e-15);
    CHECK(u.radius == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("circumcircle: degenerate inputs") {
    CHECK(throws_with_tag([] { circumcircle(1.0, 1.0, 2.0); }, "Coincident"));
    CHECK(throws_with_tag([] { circumcircle(0.0, 1.0, 2.0); }, "Collinear"));
    CHECK(throws_with_tag([] { circumcircle(0.0, 1.0 + I, 2.0 + 2.0 * I); },
                          "Collinear"));
    CHECK(throws_with_tag([] { circumcircle(0.0, 0.0, 0.0); }, "Coincident"));
    // Nearly collinear but not within tolerance: should still succeed.
    Circle c = circumcircle(0.0, 1.0, cplx{2.0, 1e-6});
    CHECK(std::isfinite(c.radius));
}

TEST_CASE("circumcircle: incidence and bisector oracle over random triples") {
    oracle::Rng rng(20260501);
    for (int it = 0; it < 500; ++it) {
        cplx p = rng.box(5.0), q = rng.box(5.0), r = rng.box(5.0);
        Circle c;
        try {
            c = circumcircle(p, q, r);
        } catch (const DegeneracyError&) {
            continue;
        }
        for (cplx z : {p, q, r})
            CHECK(std::abs(std::abs(z - c.center) - c.radius) <= 1e-12 * c.radius);
        cplx oc = oracle::circumcenter_bisector(p, q, r);
        CHECK(std::abs(oc - c.center) <= 1e-9 * (1.0 + std::abs(oc)));
    }
}

TEST_CASE("moebius_from_triples: fixed example (0,1,2) -> (0,1,4)") {
    MoebiusMap m = moebius_from_triples({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
    // Expected map 2z / (3 - z), up to overall scale.
    CHECK(oracle::moebius_proj_dist(m, MoebiusMap{2.0, 0.0, -1.0, 3.0}) < 1e-14);
    CHECK(std::abs(moebius_apply(m, 2.0).value - 4.0) < 1e-14);
}

TEST_CASE("moebius_from_triples: interpolation property") {
    oracle::Rng rng(777001);
    for (int it = 0; it < 300; ++it) {
        std::array<cplx, 3> src{rng.box(4.0), rng.box(4.0), rng.box(4.0)};
        std::array<cplx, 3> dst{rng.box(4.0), rng.box(4.0), rng.box(4.0)};
        MoebiusMap m;
        try {
            m = moebius_from_triples(src, dst);
        } catch (const DegeneracyError&) {
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            ExtendedPoint w = moebius_apply(m, src[i]);
            REQUIRE(!w.infinite);
            CHECK(std::abs(w.value - dst[i]) <= 1e-11 * (1.0 + std::abs(dst[i])));
        }
    }
}

TEST_CASE("moebius_from_triples: repeated point rejected") {
    CHECK(throws_with_tag(
        [] { moebius_from_triples({1.0, 1.0, 2.0}, {0.0, 1.0, 3.0}); },
        "DegenerateTriple"));
    CHECK(throws_with_tag(
        [] { moebius_from_triples({0.0, 1.0, 2.0}, {3.0, 5.0, 3.0}); },
        "DegenerateTriple"));
}

TEST_CASE("moebius_from_triples_ext: infinite points via limit formulas") {
    // (inf, 1, 0) -> (0, 1, inf) is z -> 1/z.
    MoebiusMap inv = moebius_from_triples_ext(
        {ExtendedPoint::at_infinity(), ExtendedPoint{1.0}, ExtendedPoint{0.0}},
        {ExtendedPoint{0.0}, ExtendedPoint{1.0}, ExtendedPoint::at_infinity()});
    CHECK(std::abs(moebius_apply(inv, 4.0).value - 0.25) < 1e-15);
    CHECK(moebius_apply(inv, 0.0).infinite);

    // Finite case must agree with the determinant construction.
    std::array<cplx, 3> src{0.5, 1.0 + I, -2.0};
    std::array<cplx, 3> dst{1.0, -I, 3.0};
    MoebiusMap a = moebius_from_triples(src, dst);
    MoebiusMap b = moebius_from_triples_ext(
        {ExtendedPoint{src[0]}, ExtendedPoint{src[1]}, ExtendedPoint{src[2]}},
        {ExtendedPoint{dst[0]}, ExtendedPoint{dst[1]}, ExtendedPoint{dst[2]}});
    CHECK(oracle::moebius_proj_dist(a, b) < 1e-12);

    // Two infinities in one triple are rejected.
    CHECK(throws_with_tag(
        [] {
            moebius_from_triples_ext({ExtendedPoint::at_infinity(),
                                      ExtendedPoint::at_infinity(),
                                      ExtendedPoint{0.0}},
                                     {ExtendedPoint{0.0}, ExtendedPoint{1.0},
                                      ExtendedPoint{2.0}});
        },
        "DegenerateTriple"));
}

TEST_CASE("moebius_apply: pole and infinity semantics") {
    MoebiusMap m{1.0, 0.0, 1.0, -2.0};  // z / (z - 2)
    CHECK(moebius_apply(m, 2.0).infinite);
    ExtendedPoint w = moebius_apply(m, ExtendedPoint::at_infinity());
    REQUIRE(!w.infinite);
    CHECK(std::abs(w.value - 1.0) < 1e-15);

    MoebiusMap affine{2.0, 1.0, 0.0, 1.0};
    CHECK(moebius_apply(affine, ExtendedPoint::at_infinity()).infinite);
}

TEST_CASE("moebius inverse and composition") {
    oracle::Rng rng(424242);
    for (int it = 0; it < 100; ++it) {
        MoebiusMap m{rng.box(3.0), rng.box(3.0), rng.box(3.0), rng.box(3.0)};
        if (std::abs(m.det()) < 1e-3) continue;
        MoebiusMap mi = moebius_inverse(m);
        cplx z = rng.box(2.0);
        ExtendedPoint w = moebius_apply(m, z);
        if (w.infinite) continue;
        ExtendedPoint back = moebius_apply(mi, w);
        REQUIRE(!back.infinite);
        CHECK(std::abs(back.value - z) <= 1e-10 * (1.0 + std::abs(z)));

        MoebiusMap m2{rng.box(3.0), rng.box(3.0), rng.box(3.0), rng.box(3.0)};
        if (std::abs(m2.det()) < 1e-3) continue;
        ExtendedPoint lhs = moebius_apply(moebius_compose(m2, m), z);
        ExtendedPoint rhs = moebius_apply(m2, moebius_apply(m, z));
        if (lhs.infinite || rhs.infinite) continue;
        CHECK(std::abs(lhs.value - rhs.value) <= 1e-9 * (1.0 + std::abs(rhs.value)));
    }
}

TEST_CASE("canonical_map: fixed examples") {
    MoebiusMap m = canonical_map(0.0, 1.0, 3.0);
    CHECK(std::abs(moebius_apply(m, 2.0).value - 4.0) < 1e-14);
    CHECK(std::abs(moebius_apply(m, 0.0).value) < 1e-14);
    CHECK(std::abs(moebius_apply(m, 1.0).value - 1.0) < 1e-14);
    CHECK(moebius_apply(m, 3.0).infinite);

    MoebiusMap u = canonical_map(1.0, I, -1.0);
    CHECK(std::abs(moebius_apply(u, 0.0).value - I) < 1e-14);
}

TEST_CASE("cross_ratio: fixed example and moebius invariance") {
    CHECK(std::abs(cross_ratio(0.0, 1.0, 2.0, 3.0) - 4.0) < 1e-14);

    oracle::Rng rng(90210);
    int tested = 0;
    for (int it = 0; it < 300; ++it) {
        cplx z1 = rng.box(4.0), z2 = rng.box(4.0), z3 = rng.box(4.0),
             z4 = rng.box(4.0);
        MoebiusMap m{rng.box(2.0), rng.box(2.0), rng.box(2.0), rng.box(2.0)};
        if (std::abs(m.det()) < 1e-2) continue;
        cplx a;
        try {
            a = cross_ratio(z1, z2, z3, z4);
        } catch (const DegeneracyError&) {
            continue;
        }
        ExtendedPoint w1 = moebius_apply(m, z1), w2 = moebius_apply(m, z2),
                      w3 = moebius_apply(m, z3), w4 = moebius_apply(m, z4);
        if (w1.infinite || w2.infinite || w3.infinite || w4.infinite) continue;
        cplx b;
        try {
            b = cross_ratio(w1.value, w2.value, w3.value, w4.value);
        } catch (const DegeneracyError&) {
            continue;
        }
        CHECK(rel_err(b, a) <= 1e-10);
        ++tested;
    }
    CHECK(tested > 200);

    // cross_ratio equals the canonical map applied to z3.
    cplx a = cross_ratio(0.5, 1.0 + I, -2.0 + 0.5 * I, 3.0);
    cplx b = moebius_apply(canonical_map(0.5, 1.0 + I, 3.0), -2.0 + 0.5 * I).value;
    CHECK(rel_err(a, b) <= 1e-13);

    CHECK(throws_with_tag([] { cross_ratio(0.0, 0.0, 1.0, 2.0); },
                          "DegeneratePoints"));
}

TEST_CASE("AngleTriple: reduction and chords") {
    AngleTriple t(2.0 * pi / 3.0 + 2.0 * pi, -2.0 * pi / 3.0, 0.0);
    CHECK(t.phi1 == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
    CHECK(t.phi2 == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
    CHECK(t.phi4 == 0.0);

    AngleTriple w(2.0 * pi / 3.0, 4.0 * pi / 3.0, 0.0);
    CHECK(w.chord(1, 2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(w.chord(2, 4) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(w.chord(4, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    auto pts = w.points();
    CHECK(std::abs(pts[0] - std::polar(1.0, 2.0 * pi / 3.0)) < 1e-15);
    CHECK(std::abs(pts[2] - 1.0) < 1e-15);
}

TEST_CASE("unit_circle_maps: witness zeta0 and verified direction") {
    AngleTriple w(2.0 * pi / 3.0, 4.0 * pi / 3.0, 0.0);
    UnitCircleMaps maps = unit_circle_maps(w);
    CHECK(std::abs(maps.zeta0 - cplx{0.5, std::sqrt(3.0) / 2.0}) < 1e-14);

    auto pts = w.points();
    CHECK(std::abs(moebius_apply(maps.forward, pts[0]).value) < 1e-14);
    CHECK(std::abs(moebius_apply(maps.forward, pts[1]).value - 1.0) < 1e-13);
    CHECK(moebius_apply(maps.forward, pts[2]).infinite);

    // Convention check: forward(0) = zeta0, inverse(zeta0) = 0.
    CHECK(std::abs(moebius_apply(maps.forward, 0.0).value - maps.zeta0) < 1e-14);
    CHECK(std::abs(moebius_apply(maps.inverse, maps.zeta0).value) < 1e-14);

    // inverse really inverts forward.
    CHECK(oracle::moebius_proj_dist(moebius_compose(maps.inverse, maps.forward),
                                    MoebiusMap::identity()) < 1e-12);
}

TEST_CASE("unit_circle_maps: random angles round-trip") {
    oracle::Rng rng(5150);
    for (int it = 0; it < 200; ++it) {
        AngleTriple t(rng.uniform(0.0, 2.0 * pi), rng.uniform(0.0, 2.0 * pi),
                      rng.uniform(0.0, 2.0 * pi));
        UnitCircleMaps maps;
        try {
            maps = unit_circle_maps(t);
        } catch (const DegeneracyError&) {
            continue;
        }
        auto pts = t.points();
        CHECK(std::abs(moebius_apply(maps.forward, pts[0]).value) < 1e-11);
        CHECK(std::abs(moebius_apply(maps.forward, pts[1]).value - 1.0) < 1e-9);
        CHECK(std::abs(moebius_apply(maps.forward, ExtendedPoint::at_infinity())
                           .value -
                       std::conj(maps.zeta0)) < 1e-12);
        CHECK(std::abs(moebius_apply(maps.inverse, ExtendedPoint::at_infinity())
                           .value -
                       std::polar(1.0, t.phi4)) < 1e-12);
    }
    CHECK(throws_with_tag([] { unit_circle_maps(AngleTriple(1.0, 1.0, 0.0)); },
                          "DegenerateAngles"));
}

TEST_CASE("unit_circle_coeffs: points land on the unit-circle targets") {
    oracle::Rng rng(314159);
    for (int it = 0; it < 200; ++it) {
        AngleTriple t(rng.uniform(0.0, 2.0 * pi), rng.uniform(0.0, 2.0 * pi),
                      rng.uniform(0.0, 2.0 * pi));
        std::array<cplx, 3> pts{rng.box(4.0), rng.box(4.0), rng.box(4.0)};
        MoebiusMap m;
        try {
            m = unit_circle_coeffs(t, pts);
        } catch (const DegeneracyError&) {
            continue;
        }
        auto targets = t.points();
        for (int i = 0; i < 3; ++i) {
            ExtendedPoint w = moebius_apply(m, pts[i]);
            REQUIRE(!w.infinite);
            CHECK(std::abs(w.value - targets[i]) <= 1e-10);
        }
        // Agrees with the generic interpolation construction.
        MoebiusMap generic = moebius_from_triples(pts, targets);
        CHECK(oracle::moebius_proj_dist(m, generic) < 1e-9);
    }
}
