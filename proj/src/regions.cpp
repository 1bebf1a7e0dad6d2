#include "heun/regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <queue>
#include <vector>

namespace heun::regions {

namespace {

const double pi = std::acos(-1.0);

// Trig helpers with forced odd/even symmetry, so that negating the
// argument negates (resp. preserves) the result bit-for-bit. The scan
// kernels rely on this to make conjugation symmetry exact.
double sin_sym(double x) { return x < 0.0 ? -std::sin(-x) : std::sin(x); }
double cos_sym(double x) { return std::cos(std::fabs(x)); }

constexpr double kDegenerateTol = 1e-10;

void require_resolution(int n1, int n2) {
    if (n1 < 8 || n2 < 8)
        throw ParseError("resolution must be at least 8 cells per axis");
}

void for_each_cell(int n1, int n2, Exec exec, const std::function<void(int, int)>& fn) {
    const long total = long(n1) * n2;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long idx = 0; idx < total; ++idx) fn(int(idx % n1), int(idx / n1));
    } else {
        for (long idx = 0; idx < total; ++idx) fn(int(idx % n1), int(idx / n1));
    }
}

// Signed offset of the cell center from the torus midpoint pi:
// center(i) = (i + 1/2) * 2pi/n = pi + m * pi/n with m = 2i + 1 - n.
// Mirror cells (i, n-1-i) have exactly opposite m, which keeps the
// conjugation symmetry of the predicates exact in floating point.
int torus_numerator(int i, int n) { return 2 * i + 1 - n; }

struct TorusCell {
    double u1, u2;  // half-offsets d/2, where Phi = pi + d
};

TorusCell torus_cell(int i1, int i2, int n1, int n2) {
    double h1 = pi / n1, h2 = pi / n2;
    return {0.5 * (torus_numerator(i1, n1) * h1), 0.5 * (torus_numerator(i2, n2) * h2)};
}

// Condition A at a torus cell. With Phi = pi + 2u and Phi4 = 0:
//   r12 = 2|sin(u1 - u2)|, r24 = 2|cos(u2)|, r41 = 2|cos(u1)|.
bool cell_condition_a(const TorusCell& c) {
    double s12 = std::fabs(sin_sym(c.u1 - c.u2));
    double s24 = std::fabs(cos_sym(c.u2));
    double s41 = std::fabs(cos_sym(c.u1));
    return s12 > 0.5 && s24 > 0.5 && s41 > 0.5;
}

// Labels for the AB scan at fixed a: 0 false, 1 true, 2 degenerate.
std::uint8_t cell_condition_ab(const TorusCell& c, cplx a) {
    if (!cell_condition_a(c)) return 0;
    // zeta0 in half-angle terms: s14 = cos u1, c14 = -sin u1, s42 = -cos u2.
    double s12 = sin_sym(c.u1 - c.u2);
    double s14 = cos_sym(c.u1);
    double c14 = -sin_sym(c.u1);
    double s42 = -cos_sym(c.u2);
    cplx zeta0{c14 * s42 / s12, s14 * s42 / s12};

    if (std::abs(a) <= kDegenerateTol) return 2;
    if (std::abs(a - 1.0) <= kDegenerateTol) return 2;
    cplx den = a - std::conj(zeta0);
    if (std::abs(den) <= kDegenerateTol * std::max(1.0, std::abs(a))) return 2;
    cplx z3 = (a - zeta0) / den;
    if (std::abs(z3) <= kDegenerateTol) return 2;

    cplx p1{-cos_sym(2.0 * c.u1), -sin_sym(2.0 * c.u1)};
    cplx p2{-cos_sym(2.0 * c.u2), -sin_sym(2.0 * c.u2)};
    cplx p4{1.0, 0.0};
    double d1 = std::abs(z3 - p1), d2 = std::abs(z3 - p2), d4 = std::abs(z3 - p4);
    if (std::min({d1, d2, d4}) <= kDegenerateTol) return 2;
    return std::min({d1, d2, d4}) > std::abs(z3) ? 1 : 0;
}

}  // namespace

bool condition_a(const geometry::AngleTriple& phis) {
    return phis.chord(1, 2) > 1.0 && phis.chord(2, 4) > 1.0 && phis.chord(4, 1) > 1.0;
}

bool condition_a_points(cplx z1, cplx z2, cplx z4) {
    geometry::Circle circ;
    try {
        circ = geometry::circumcircle(z1, z2, z4);
    } catch (const DegeneracyError&) {
        return false;
    }
    double d12 = std::abs(z1 - z2), d24 = std::abs(z2 - z4), d41 = std::abs(z4 - z1);
    return d12 > circ.radius && d24 > circ.radius && d41 > circ.radius;
}

cplx z3_from_a(cplx a, const geometry::AngleTriple& phis) {
    geometry::UnitCircleMaps maps = geometry::unit_circle_maps(phis);
    if (std::abs(a) <= kDegenerateTol)
        throw DegeneracyError("DegenerateA", "a coincides with the image of z1");
    if (std::abs(a - 1.0) <= kDegenerateTol)
        throw DegeneracyError("DegenerateA", "a coincides with the image of z2");
    cplx den = a - std::conj(maps.zeta0);
    if (std::abs(den) <= kDegenerateTol * std::max(1.0, std::abs(a)))
        throw DegeneracyError("DegenerateA", "a at the pole of the inverse map");
    cplx z3 = std::polar(1.0, phis.phi4) * (a - maps.zeta0) / den;
    if (std::abs(z3) <= kDegenerateTol)
        throw DegeneracyError("DegenerateA", "recovered z3 vanishes");
    for (const cplx& p : phis.points())
        if (std::abs(z3 - p) <= kDegenerateTol)
            throw DegeneracyError("DegenerateA", "recovered z3 collides with a unit-circle point");
    return z3;
}

bool condition_b(const geometry::AngleTriple& phis, cplx a) {
    cplx z3 = z3_from_a(a, phis);
    auto pts = phis.points();
    double dmin = 1e300;
    for (const cplx& p : pts) dmin = std::min(dmin, std::abs(z3 - p));
    return dmin > std::abs(z3);
}

bool condition_b_points(cplx z1, cplx z2, cplx z3, cplx z4) {
    geometry::Circle circ;
    try {
        circ = geometry::circumcircle(z1, z2, z4);
    } catch (const DegeneracyError&) {
        return false;
    }
    double dmin = std::min({std::abs(z3 - z1), std::abs(z3 - z2), std::abs(z3 - z4)});
    return dmin > std::abs(z3 - circ.center);
}

double RegionRaster::axis1_center(int i1) const {
    if (kind == "dmn") {
        double step = (axis1_max - axis1_min) / n1;
        return 0.5 * (axis1_min + axis1_max) + torus_numerator(i1, n1) * 0.5 * step;
    }
    return pi + torus_numerator(i1, n1) * (pi / n1);
}

double RegionRaster::axis2_center(int i2) const {
    if (kind == "dmn") {
        double step = (axis2_max - axis2_min) / n2;
        return 0.5 * (axis2_min + axis2_max) + torus_numerator(i2, n2) * 0.5 * step;
    }
    return pi + torus_numerator(i2, n2) * (pi / n2);
}

RegionRaster scan_condition_a(int n1, int n2, Exec exec) {
    require_resolution(n1, n2);
    RegionRaster r;
    r.axis1_min = 0.0;
    r.axis1_max = 2.0 * pi;
    r.axis2_min = 0.0;
    r.axis2_max = 2.0 * pi;
    r.n1 = n1;
    r.n2 = n2;
    r.kind = "condition_a";
    r.cells.assign(std::size_t(n1) * n2, 0);
    for_each_cell(n1, n2, exec, [&](int i1, int i2) {
        r.cells[std::size_t(i2) * n1 + i1] =
            cell_condition_a(torus_cell(i1, i2, n1, n2)) ? 1 : 0;
    });
    return r;
}

RegionRaster scan_condition_ab(cplx a, int n1, int n2, Exec exec) {
    require_resolution(n1, n2);
    RegionRaster r;
    r.axis1_min = 0.0;
    r.axis1_max = 2.0 * pi;
    r.axis2_min = 0.0;
    r.axis2_max = 2.0 * pi;
    r.n1 = n1;
    r.n2 = n2;
    r.kind = "condition_ab";
    r.fixed_a = a;
    r.cells.assign(std::size_t(n1) * n2, 0);
    for_each_cell(n1, n2, exec, [&](int i1, int i2) {
        r.cells[std::size_t(i2) * n1 + i1] = cell_condition_ab(torus_cell(i1, i2, n1, n2), a);
    });
    return r;
}

namespace {

// Inner witness grid for the dmn scan: corner-aligned angles
// Phi = s * 2pi/N with signed s in (-N/2, N/2]. Precomputed tables keyed
// by |integer index| keep mirrored lookups exactly opposite/equal.
struct InnerGrid {
    int n = 0;
    std::vector<double> half_sin, half_cos;  // sin/cos(k * pi/N), k in [0, N]
    std::vector<double> full_sin, full_cos;  // sin/cos(k * 2pi/N), k in [0, N/2]

    explicit InnerGrid(int inner) : n(inner) {
        half_sin.resize(n + 1);
        half_cos.resize(n + 1);
        for (int k = 0; k <= n; ++k) {
            half_sin[k] = std::sin(k * (pi / n));
            half_cos[k] = std::cos(k * (pi / n));
        }
        full_sin.resize(n / 2 + 1);
        full_cos.resize(n / 2 + 1);
        for (int k = 0; k <= n / 2; ++k) {
            full_sin[k] = std::sin(k * (2.0 * pi / n));
            full_cos[k] = std::cos(k * (2.0 * pi / n));
        }
    }

    double hsin(int k) const { return k < 0 ? -half_sin[-k] : half_sin[k]; }
    double hcos(int k) const { return half_cos[k < 0 ? -k : k]; }
    cplx point(int s) const {
        return {full_cos[s < 0 ? -s : s], s < 0 ? -full_sin[-s] : full_sin[s]};
    }
};

struct WitnessEntry {
    cplx zeta0, p1, p2;
};

// Pairs (s1, s2) passing Condition A, with their zeta0 and circle points.
// With Phi4 = 0 and Phi_k = 2 u_k, u_k = s_k pi/N:
//   s12 = sin(u1 - u2), s14 = sin(u1), c14 = cos(u1), s42 = -sin(u2).
std::vector<WitnessEntry> witness_table(const InnerGrid& g) {
    std::vector<WitnessEntry> table;
    // Both signed halves are kept (s = -N/2 duplicates N/2 mod 2pi) so the
    // mirror of every entry is itself an entry with exactly conjugated
    // values; an existential scan is indifferent to the duplication.
    for (int s1 = -g.n / 2; s1 <= g.n / 2; ++s1) {
        for (int s2 = -g.n / 2; s2 <= g.n / 2; ++s2) {
            double r12 = std::fabs(g.hsin(s1 - s2));
            double r24 = std::fabs(g.hsin(s2));
            double r41 = std::fabs(g.hsin(s1));
            if (!(r12 > 0.5 && r24 > 0.5 && r41 > 0.5)) continue;
            double s12 = g.hsin(s1 - s2);
            double s14 = g.hsin(s1);
            double c14 = g.hcos(s1);
            double s42 = -g.hsin(s2);
            table.push_back({cplx{c14 * s42 / s12, s14 * s42 / s12},
                             g.point(s1), g.point(s2)});
        }
    }
    return table;
}

bool dmn_witness(const std::vector<WitnessEntry>& table, cplx a) {
    const cplx p4{1.0, 0.0};
    for (const WitnessEntry& w : table) {
        cplx den = a - std::conj(w.zeta0);
        if (std::abs(den) <= kDegenerateTol * std::max(1.0, std::abs(a))) continue;
        cplx z3 = (a - w.zeta0) / den;
        double r3 = std::abs(z3);
        if (r3 <= kDegenerateTol) continue;
        double dmin = std::min(
            {std::abs(z3 - w.p1), std::abs(z3 - w.p2), std::abs(z3 - p4)});
        if (dmin > r3) return true;
    }
    return false;
}

}  // namespace

RegionRaster scan_dmn(double a1_min, double a1_max, double a2_min, double a2_max,
                      int na1, int na2, int inner, Exec exec) {
    require_resolution(na1, na2);
    if (inner < 8) throw ParseError("inner resolution must be at least 8");
    if (!(a1_min < a1_max) || !(a2_min < a2_max))
        throw ParseError("scan window must have positive extent");

    RegionRaster r;
    r.axis1_min = a1_min;
    r.axis1_max = a1_max;
    r.axis2_min = a2_min;
    r.axis2_max = a2_max;
    r.n1 = na1;
    r.n2 = na2;
    r.kind = "dmn";
    r.inner_resolution = inner;
    r.cells.assign(std::size_t(na1) * na2, 0);

    InnerGrid grid(inner);
    std::vector<WitnessEntry> table = witness_table(grid);

    for_each_cell(na1, na2, exec, [&](int i1, int i2) {
        cplx a{r.axis1_center(i1), r.axis2_center(i2)};
        std::uint8_t label;
        if (std::abs(a) <= kDegenerateTol || std::abs(a - 1.0) <= kDegenerateTol)
            label = 2;
        else
            label = dmn_witness(table, a) ? 1 : 0;
        r.cells[std::size_t(i2) * na1 + i1] = label;
    });
    return r;
}

int connected_components_torus(const RegionRaster& raster) {
    const int n1 = raster.n1, n2 = raster.n2;
    std::vector<std::uint8_t> seen(raster.cells.size(), 0);
    int components = 0;
    for (std::size_t start = 0; start < raster.cells.size(); ++start) {
        if (raster.cells[start] != 1 || seen[start]) continue;
        ++components;
        std::queue<std::size_t> queue;
        queue.push(start);
        seen[start] = 1;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop();
            int i1 = int(cur % n1), i2 = int(cur / n1);
            for (int d2 = -1; d2 <= 1; ++d2) {
                for (int d1 = -1; d1 <= 1; ++d1) {
                    if (d1 == 0 && d2 == 0) continue;
                    int j1 = (i1 + d1 + n1) % n1;
                    int j2 = (i2 + d2 + n2) % n2;
                    std::size_t idx = std::size_t(j2) * n1 + j1;
                    if (raster.cells[idx] == 1 && !seen[idx]) {
                        seen[idx] = 1;
                        queue.push(idx);
                    }
                }
            }
        }
    }
    return components;
}

void write_csv(const RegionRaster& raster, std::ostream& out) {
    const bool torus = raster.kind != "dmn";
    out << (torus ? "phi1,phi2,label\n" : "re_a,im_a,label\n");
    char buf[96];
    for (int i2 = 0; i2 < raster.n2; ++i2) {
        for (int i1 = 0; i1 < raster.n1; ++i1) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%u\n",
                          raster.axis1_center(i1), raster.axis2_center(i2),
                          unsigned(raster.at(i1, i2)));
            out << buf;
        }
    }
}

void write_ppm(const RegionRaster& raster, std::ostream& out) {
    out << "P6\n" << raster.n1 << ' ' << raster.n2 << "\n255\n";
    static const unsigned char palette[3][3] = {
        {38, 38, 48},     // false
        {205, 222, 255},  // true
        {128, 128, 128},  // degenerate
    };
    std::vector<char> row(std::size_t(raster.n1) * 3);
    for (int i2 = 0; i2 < raster.n2; ++i2) {
        for (int i1 = 0; i1 < raster.n1; ++i1) {
            const unsigned char* rgb = palette[raster.at(i1, i2)];
            row[std::size_t(i1) * 3 + 0] = char(rgb[0]);
            row[std::size_t(i1) * 3 + 1] = char(rgb[1]);
            row[std::size_t(i1) * 3 + 2] = char(rgb[2]);
        }
        out.write(row.data(), std::streamsize(row.size()));
    }
}

}  // namespace heun::regions
