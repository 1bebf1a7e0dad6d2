#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heun/errors.hpp"
#include "heun/geometry.hpp"

namespace heun::regions {

using cplx = std::complex<double>;

// Condition A for a unit-circle triple: all three chords exceed the
// circumradius 1, i.e. 2|sin((Phi_k - Phi_l)/2)| > 1 strictly for the
// pairs (1,2), (2,4), (4,1).
bool condition_a(const geometry::AngleTriple& phis);

// Geometric form for arbitrary points: every pairwise distance among
// the triple exceeds the circumradius. Degenerate triples (collinear
// or coincident) yield false.
bool condition_a_points(cplx z1, cplx z2, cplx z4);

// Third singular point from the standard-form location a:
//   z3 = e^{i Phi4} (a - zeta0) / (a - conj zeta0),
// the inverse unit-circle map applied to a.
// Throws DegeneracyError("DegenerateA") when a sits on {0, 1}, at the
// pole conj(zeta0), or when the resulting z3 collides with 0 or with
// one of the unit-circle points (tolerance 1e-10).
cplx z3_from_a(cplx a, const geometry::AngleTriple& phis);

// Condition B: min(|z3 - z1|, |z3 - z2|, |z3 - z4|) > |z3| strictly,
// with z3 recovered from a. Propagates DegenerateA.
bool condition_b(const geometry::AngleTriple& phis, cplx a);

// Geometric form for arbitrary points: the circumcenter of (z1, z2, z4)
// lies strictly closer to z3 than any of the three points do.
bool condition_b_points(cplx z1, cplx z2, cplx z3, cplx z4);

enum class Exec { serial, parallel };

// Raster over a parameter rectangle. Cells are row-major with the
// axis2 index as the slow dimension; row 0 holds the smallest axis2
// value. Labels: 0 = false, 1 = true, 2 = degenerate input.
struct RegionRaster {
    double axis1_min = 0.0, axis1_max = 0.0;
    double axis2_min = 0.0, axis2_max = 0.0;
    int n1 = 0, n2 = 0;
    std::vector<std::uint8_t> cells;
    std::string kind;
    cplx fixed_a{};
    int inner_resolution = 0;

    std::uint8_t at(int i1, int i2) const { return cells[std::size_t(i2) * n1 + i1]; }
    double axis1_center(int i1) const;
    double axis2_center(int i2) const;
};

// Raster of Condition A over (Phi1, Phi2) in [0, 2pi)^2 with Phi4 = 0;
// cell true iff the condition holds at the cell center.
RegionRaster scan_condition_a(int n1, int n2, Exec exec = Exec::parallel);

// Conjunction of Conditions A and B at fixed a over the same torus.
// Cells whose z3 recovery degenerates are labeled 2.
RegionRaster scan_condition_ab(cplx a, int n1, int n2, Exec exec = Exec::parallel);

// Existential scan over an a-window: a cell is true iff some (Phi1,
// Phi2) on the corner-aligned inner grid (Phi4 = 0, inner x inner
// points) satisfies Conditions A and B for that a. The inner grid is
// an accuracy parameter; refining it can only grow the true set.
// Cells with a within 1e-9 of {0, 1} are labeled 2.
RegionRaster scan_dmn(double a1_min, double a1_max, double a2_min, double a2_max,
                      int na1, int na2, int inner = 128, Exec exec = Exec::parallel);

// Number of 8-connected components of the true set, with wraparound on
// both axes (the scan rectangle is a torus fundamental domain).
int connected_components_torus(const RegionRaster& raster);

// Cell centers + labels, one row per cell, %.17g fields.
void write_csv(const RegionRaster& raster, std::ostream& out);

// Binary PPM (P6), one pixel per cell, row 0 = smallest axis2.
// Palette: true (205,222,255), false (38,38,48), degenerate (128,128,128).
void write_ppm(const RegionRaster& raster, std::ostream& out);

}  // namespace heun::regions
