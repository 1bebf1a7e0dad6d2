#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "heun/errors.hpp"
#include "heun/series.hpp"

namespace heun::connection {

using cplx = std::complex<double>;
using series::LocalSolution;
using series::SymmetricHeunConfig;

// Margin inside the 0.95-safety evaluation disc required of connection
// evaluation points: |at - z_j| <= (0.95 - 0.02) * R_j.
inline constexpr double admission_factor = 0.93;

// Two solutions sharing a center with nonvanishing Wronskian.
struct FundamentalPair {
    LocalSolution sol1, sol2;

    cplx center() const { return sol1.center; }
};

// Identifies the basis bookkeeping a matrix was produced under: where the
// pairs were evaluated and which branch cuts the Frobenius solutions carry.
// Matrices may be composed only when their cut directions agree.
struct ConventionFingerprint {
    cplx eval_point{};
    std::array<double, 4> cut_directions{};

    friend bool operator==(const ConventionFingerprint&,
                           const ConventionFingerprint&) = default;
};

// 2x2 matrix expressing the pair at source_center in the pair at
// target_center: F(z; source) = C * F(z; target). Entries row-major.
struct ConnectionMatrix {
    std::array<cplx, 4> entries{};
    cplx source_center{}, target_center{};
    ConventionFingerprint convention{};
    // Relative Frobenius distance between the closed-form entries and the
    // product-form evaluation; -1 when the matrix was produced by
    // composition and never verified against a direct evaluation.
    double dual_path_residual = 0.0;

    cplx determinant() const {
        return entries[0] * entries[3] - entries[1] * entries[2];
    }
};

// Canonical pair at a regular point: initial data (1, 0) and (0, 1),
// unit Wronskian. Errors: CenterIsSingular.
FundamentalPair canonical_pair(const SymmetricHeunConfig& cfg, cplx at);

// Frobenius pair at singular point j (1-based): both exponent branches,
// c0 = 1. Errors: BadIndex, DegenerateExponents.
FundamentalPair frobenius_pair(const SymmetricHeunConfig& cfg, int j);

// C(z_k, at): the Frobenius pair at z_k expressed in the canonical basis
// at the regular point `at`; rows are [F_i(at), F_i'(at)]. Its determinant
// is the Frobenius-pair Wronskian at `at`.
// Errors: PointOutsideDisc (admission margin), CenterIsSingular,
// DegenerateExponents, OnBranchCut.
ConnectionMatrix connect_to_point(const SymmetricHeunConfig& cfg, int k, cplx at);

// C(z_k, z_l) through the common regular point `at` by the closed forms:
// with W_l the l-pair Wronskian at `at`,
//   C11 = (F1k F2l' - F2l F1k') / W_l,  C12 = (F1l F1k' - F1k F1l') / W_l,
//   C21 = (F2k F2l' - F2l F2k') / W_l,  C22 = (F1l F2k' - F2k F1l') / W_l.
// The product form C(z_k,at) C(z_l,at)^{-1} is evaluated as an internal
// cross-check and its relative deviation stored as dual_path_residual.
// k == l returns the identity. Errors: PointOutsideDisc,
// SingularDenominator (|W_l| below 1e-12 of the pair scale), OnBranchCut.
ConnectionMatrix connection_matrix(const SymmetricHeunConfig& cfg, int k, int l,
                                   cplx at);

// Frobenius-norm residual of C(z_k,z_l) C(z_l,z_m) - C(z_k,z_m), relative
// to the norm of C(z_k,z_m), each matrix computed at its given point.
// Small only when the three points lie in a consistent branch regime.
double chain_check(const SymmetricHeunConfig& cfg, int k, int l, int m,
                   cplx at_kl, cplx at_lm, cplx at_km);

// Deterministic overlap samples around `at` for pairs (k, l): 10 points on
// two concentric circles whose radii are 0.3 and 0.6 of the admissible
// depth. An index whose disc admits `at` contributes its series margin
// (distance to the safety disc, capped by the distance to its branch-cut
// ray); an index whose disc does not admit `at` imposes no series bound,
// since its samples are reached by path continuation from `at`. The depth
// is always capped at 0.45 of the distance from `at` to the nearest
// singular point so continuation segments stay clear.
std::vector<cplx> residual_sample_points(const SymmetricHeunConfig& cfg, int k,
                                         int l, cplx at);

// max over the sample set of |F(z; z_k) - C F(z; z_l)| / |F(z; z_k)|
// (Euclidean norm on the value/derivative vector).
double reconstruction_residual(const SymmetricHeunConfig& cfg,
                               const ConnectionMatrix& matrix, int k, int l);

enum class AtlasMode { single_point, multi_center };

// Complete pairwise connection data for one configuration.
// pairwise holds the six matrices C(z_k, z_l) for k < l in the order
// (1,2), (1,3), (1,4), (2,3), (2,4), (3,4); provenance describes how each
// was obtained. single_point mode also fills base with C(z_k, 0), k = 1..4.
struct Atlas {
    AtlasMode mode = AtlasMode::single_point;
    std::vector<ConnectionMatrix> base;
    std::vector<ConnectionMatrix> pairwise;
    std::vector<std::string> provenance;
    double max_residual = 0.0;
};

// Atlas through the origin, requiring the geometric Conditions A and B
// (triple (z1, z2, z4) against z3). A disc whose safety margin does not
// reach the origin contributes the values of its pair there by analytic
// continuation: the pair is summed at a launch point inside the disc and
// integrated to the origin along a deterministic straight path that
// clears every singular point, which fixes the branch. Errors:
// ConditionViolated:A, ConditionViolated:B, DegenerateExponents,
// SingularDenominator, PathTooCloseToSingularity (no clear launch path).
Atlas single_point_atlas(const SymmetricHeunConfig& cfg);

// Atlas assembled from per-triple circumcircle centers. Each triple
// (1,2,4), (1,2,3), (1,3,4), (2,3,4) whose center is admissible for its
// three discs contributes direct matrices; the remaining pairs are
// composed along shortest chains and carry dual_path_residual = -1.
// Requires Condition A only. Errors: ConditionViolated:A,
// CenterOutsideDiscs (no admissible triple), NoChain (some pair
// unreachable through shared-index chains).
Atlas multi_center_atlas(const SymmetricHeunConfig& cfg);

}  // namespace heun::connection
