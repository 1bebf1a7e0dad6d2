#include "heun/connection.hpp"

#include "heun/geometry.hpp"
#include "heun/regions.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

namespace heun::connection {

namespace {

const double pi = std::acos(-1.0);

// Truncation budget for the pair evaluations behind every matrix. The
// determinant identity det C = W_k/W_l amplifies this by the Wronskian
// cancellation factor |F1||F2'|/|W| (typically 1e2..1e3 at the evaluation
// point), so the budget sits two decades below the 1e-10 the determinant
// must meet; the extra series terms are cheap.
constexpr double eval_tolerance = 1e-14;

struct Mat2 {
    std::array<cplx, 4> m{};

    static Mat2 identity() { return {{cplx{1.0}, {}, {}, cplx{1.0}}}; }
};

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
}

Mat2 mat_inv(const Mat2& a) {
    cplx det = a.m[0] * a.m[3] - a.m[1] * a.m[2];
    return {{a.m[3] / det, -a.m[1] / det, -a.m[2] / det, a.m[0] / det}};
}

double fro_norm(const Mat2& a) {
    double s = 0.0;
    for (const cplx& e : a.m) s += std::norm(e);
    return std::sqrt(s);
}

Mat2 as_mat(const ConnectionMatrix& c) { return {c.entries}; }

ConventionFingerprint default_fingerprint(const SymmetricHeunConfig& cfg, cplx at) {
    ConventionFingerprint fp;
    fp.eval_point = at;
    for (int j = 0; j < 4; ++j) fp.cut_directions[j] = std::arg(cfg.z[j]);
    return fp;
}

double config_scale(const SymmetricHeunConfig& cfg) {
    double s = 0.0;
    for (const cplx& z : cfg.z) s = std::max(s, std::abs(z));
    return s;
}

double min_pairwise_gap(const SymmetricHeunConfig& cfg) {
    double g = 1e300;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            g = std::min(g, std::abs(cfg.z[i] - cfg.z[j]));
    return g;
}

double disc_radius(const SymmetricHeunConfig& cfg, int j) {
    double r = 1e300;
    for (int o = 1; o <= 4; ++o)
        if (o != j) r = std::min(r, std::abs(cfg.z[j - 1] - cfg.z[o - 1]));
    return r;
}

void require_regular(const SymmetricHeunConfig& cfg, cplx at) {
    double s = config_scale(cfg);
    for (const cplx& z : cfg.z)
        if (std::abs(at - z) <= 1e-12 * s)
            throw DegeneracyError("CenterIsSingular",
                                  "evaluation point coincides with a singular point");
}

void require_index(int k) {
    if (k < 1 || k > 4)
        throw DomainError("BadIndex", "singular-point index must be 1..4");
}

// Distance from p to the branch-cut ray {center * t, t >= 1}.
double ray_distance(cplx center, cplx p) {
    cplx u = center / std::abs(center);
    cplx v = p - center;
    double along = (v * std::conj(u)).real();
    if (along <= 0.0) return std::abs(v);
    return std::fabs((v * std::conj(u)).imag());
}

double segment_distance(cplx a, cplx b, cplx p) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

struct PairEval {
    cplx f1, d1, f2, d2;
};

PairEval series_values(FundamentalPair& pair, cplx at) {
    series::EvalResult r1 = series::evaluate_adaptive(pair.sol1, at, eval_tolerance);
    series::EvalResult r2 = series::evaluate_adaptive(pair.sol2, at, eval_tolerance);
    return {r1.value, r1.derivative, r2.value, r2.derivative};
}

// A Frobenius pair with its values at an anchor point. When the anchor
// sits outside the admission margin the values come from summing the pair
// at a launch point inside the disc and integrating to the anchor; the
// launch segment is the first of 16 rotated candidates that clears every
// singular point, so the continued branch is deterministic.
struct AnchoredPair {
    FundamentalPair pair;
    cplx anchor{};
    PairEval values{};
    bool direct = true;
};

AnchoredPair anchor_pair(const SymmetricHeunConfig& cfg, int k, cplx at) {
    AnchoredPair ap{frobenius_pair(cfg, k), at, {}, true};
    cplx center = ap.pair.center();
    double radius = ap.pair.sol1.conv_radius;
    if (std::abs(at - center) <= admission_factor * radius) {
        ap.values = series_values(ap.pair, at);
        return ap;
    }

    ap.direct = false;
    double margin = 1.2 * 0.05 * min_pairwise_gap(cfg);
    double launch_radius = 0.5 * radius;
    double theta0 = std::arg(at - center);
    for (int m = 0; m < 16; ++m) {
        cplx p = center + std::polar(launch_radius, theta0 + 2.0 * pi * m / 16.0);
        if (ray_distance(center, p) <= 1e-3 * launch_radius) continue;
        bool clear = true;
        for (const cplx& z : cfg.z)
            if (segment_distance(p, at, z) <= margin) clear = false;
        if (!clear) continue;

        PairEval seed = series_values(ap.pair, p);
        std::array<cplx, 2> s1 =
            series::integrate_path(cfg, p, {seed.f1, seed.d1}, at);
        std::array<cplx, 2> s2 =
            series::integrate_path(cfg, p, {seed.f2, seed.d2}, at);
        ap.values = {s1[0], s1[1], s2[0], s2[1]};
        return ap;
    }
    throw DomainError("PathTooCloseToSingularity",
                      "no launch segment from disc " + std::to_string(k) +
                          " reaches the anchor clear of the singular points");
}

PairEval values_at(const SymmetricHeunConfig& cfg, AnchoredPair& ap, cplx z) {
    if (ap.direct) return series_values(ap.pair, z);
    std::array<cplx, 2> s1 =
        series::integrate_path(cfg, ap.anchor, {ap.values.f1, ap.values.d1}, z);
    std::array<cplx, 2> s2 =
        series::integrate_path(cfg, ap.anchor, {ap.values.f2, ap.values.d2}, z);
    return {s1[0], s1[1], s2[0], s2[1]};
}

ConnectionMatrix matrix_from_values(const PairEval& ek, const PairEval& el,
                                    cplx zk, cplx zl,
                                    const ConventionFingerprint& fp) {
    cplx wl = el.f1 * el.d2 - el.d1 * el.f2;
    double scale = (std::abs(el.f1) + std::abs(el.f2)) *
                   (std::abs(el.d1) + std::abs(el.d2));
    if (std::abs(wl) < 1e-12 * scale)
        throw DegeneracyError("SingularDenominator",
                              "target-pair Wronskian vanishes at the common point");

    ConnectionMatrix c;
    c.entries = {(ek.f1 * el.d2 - el.f2 * ek.d1) / wl,
                 (el.f1 * ek.d1 - ek.f1 * el.d1) / wl,
                 (ek.f2 * el.d2 - el.f2 * ek.d2) / wl,
                 (el.f1 * ek.d2 - ek.f2 * el.d1) / wl};
    c.source_center = zk;
    c.target_center = zl;
    c.convention = fp;

    // Product form through the canonical basis at the common point.
    Mat2 mk{{ek.f1, ek.d1, ek.f2, ek.d2}};
    Mat2 ml{{el.f1, el.d1, el.f2, el.d2}};
    Mat2 diff = mat_mul(mk, mat_inv(ml));
    for (int i = 0; i < 4; ++i) diff.m[i] -= c.entries[i];
    c.dual_path_residual = fro_norm(diff) / fro_norm(as_mat(c));
    return c;
}

ConnectionMatrix identity_matrix(const SymmetricHeunConfig& cfg, cplx center,
                                 cplx at) {
    ConnectionMatrix c;
    c.entries = Mat2::identity().m;
    c.source_center = center;
    c.target_center = center;
    c.convention = default_fingerprint(cfg, at);
    return c;
}

double reconstruction_anchored(const SymmetricHeunConfig& cfg,
                               const ConnectionMatrix& matrix, int k, int l,
                               AnchoredPair& ak, AnchoredPair& al) {
    double worst = 0.0;
    for (cplx z : residual_sample_points(cfg, k, l, matrix.convention.eval_point)) {
        PairEval ek = values_at(cfg, ak, z);
        PairEval el = values_at(cfg, al, z);
        std::array<cplx, 4> lhs{ek.f1, ek.d1, ek.f2, ek.d2};
        std::array<cplx, 4> rhs{
            matrix.entries[0] * el.f1 + matrix.entries[1] * el.f2,
            matrix.entries[0] * el.d1 + matrix.entries[1] * el.d2,
            matrix.entries[2] * el.f1 + matrix.entries[3] * el.f2,
            matrix.entries[2] * el.d1 + matrix.entries[3] * el.d2};
        double num = 0.0, denom = 0.0;
        for (int i = 0; i < 4; ++i) {
            num += std::norm(lhs[i] - rhs[i]);
            denom += std::norm(lhs[i]);
        }
        worst = std::max(worst, std::sqrt(num / denom));
    }
    return worst;
}

}  // namespace

FundamentalPair canonical_pair(const SymmetricHeunConfig& cfg, cplx at) {
    return {series::taylor_solution(cfg, at, 1.0, 0.0),
            series::taylor_solution(cfg, at, 0.0, 1.0)};
}

FundamentalPair frobenius_pair(const SymmetricHeunConfig& cfg, int j) {
    return {series::frobenius_solution(cfg, j, series::Branch::first),
            series::frobenius_solution(cfg, j, series::Branch::second)};
}

ConnectionMatrix connect_to_point(const SymmetricHeunConfig& cfg, int k, cplx at) {
    FundamentalPair pair = frobenius_pair(cfg, k);
    require_regular(cfg, at);
    if (std::abs(at - pair.center()) > admission_factor * pair.sol1.conv_radius)
        throw DomainError("PointOutsideDisc",
                          "evaluation point misses the admission margin of disc " +
                              std::to_string(k));

    PairEval e = series_values(pair, at);
    ConnectionMatrix c;
    c.entries = {e.f1, e.d1, e.f2, e.d2};
    c.source_center = cfg.z[k - 1];
    c.target_center = at;
    c.convention = default_fingerprint(cfg, at);
    return c;
}

ConnectionMatrix connection_matrix(const SymmetricHeunConfig& cfg, int k, int l,
                                   cplx at) {
    require_index(k);
    require_index(l);
    if (k == l) return identity_matrix(cfg, cfg.z[k - 1], at);

    ConnectionMatrix ck = connect_to_point(cfg, k, at);
    ConnectionMatrix cl = connect_to_point(cfg, l, at);
    PairEval ek{ck.entries[0], ck.entries[1], ck.entries[2], ck.entries[3]};
    PairEval el{cl.entries[0], cl.entries[1], cl.entries[2], cl.entries[3]};
    return matrix_from_values(ek, el, cfg.z[k - 1], cfg.z[l - 1],
                              default_fingerprint(cfg, at));
}

double chain_check(const SymmetricHeunConfig& cfg, int k, int l, int m,
                   cplx at_kl, cplx at_lm, cplx at_km) {
    ConnectionMatrix ckl = connection_matrix(cfg, k, l, at_kl);
    ConnectionMatrix clm = connection_matrix(cfg, l, m, at_lm);
    ConnectionMatrix ckm = connection_matrix(cfg, k, m, at_km);
    Mat2 lhs = mat_mul(as_mat(ckl), as_mat(clm));
    for (int i = 0; i < 4; ++i) lhs.m[i] -= ckm.entries[i];
    return fro_norm(lhs) / fro_norm(as_mat(ckm));
}

std::vector<cplx> residual_sample_points(const SymmetricHeunConfig& cfg, int k,
                                         int l, cplx at) {
    require_index(k);
    require_index(l);
    double nearest = 1e300;
    for (const cplx& z : cfg.z) nearest = std::min(nearest, std::abs(at - z));
    double depth = 0.45 * nearest;
    for (int idx : {k, l}) {
        cplx zj = cfg.z[idx - 1];
        double radius = disc_radius(cfg, idx);
        double dist = std::abs(at - zj);
        if (dist > admission_factor * radius) continue;
        depth = std::min(depth, series::default_safety * radius - dist);
        depth = std::min(depth, ray_distance(zj, at));
    }
    if (!(depth > 0.0))
        throw DomainError("PointOutsideDisc",
                          "no admissible sampling depth around the common point");

    std::vector<cplx> points;
    points.reserve(10);
    for (double frac : {0.3, 0.6})
        for (int m = 0; m < 5; ++m)
            points.push_back(at + frac * depth *
                                      std::polar(1.0, 2.0 * pi * m / 5.0 + 0.17));
    return points;
}

double reconstruction_residual(const SymmetricHeunConfig& cfg,
                               const ConnectionMatrix& matrix, int k, int l) {
    AnchoredPair ak = anchor_pair(cfg, k, matrix.convention.eval_point);
    AnchoredPair al = anchor_pair(cfg, l, matrix.convention.eval_point);
    return reconstruction_anchored(cfg, matrix, k, l, ak, al);
}

namespace {

int pair_slot(int k, int l) {
    if (k > l) std::swap(k, l);
    static constexpr int slot[5][5] = {{-1, -1, -1, -1, -1},
                                       {-1, -1, 0, 1, 2},
                                       {-1, -1, -1, 3, 4},
                                       {-1, -1, -1, -1, 5},
                                       {-1, -1, -1, -1, -1}};
    return slot[k][l];
}

constexpr std::array<std::pair<int, int>, 6> pair_order{
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

ConnectionMatrix invert_matrix(const ConnectionMatrix& c) {
    ConnectionMatrix inv = c;
    inv.entries = mat_inv(as_mat(c)).m;
    inv.source_center = c.target_center;
    inv.target_center = c.source_center;
    return inv;
}

}  // namespace

Atlas single_point_atlas(const SymmetricHeunConfig& cfg) {
    series::validate(cfg);
    if (!regions::condition_a_points(cfg.z[0], cfg.z[1], cfg.z[3]))
        throw DomainError("ConditionViolated:A",
                          "triple (z1, z2, z4) fails the chord condition");
    if (!regions::condition_b_points(cfg.z[0], cfg.z[1], cfg.z[2], cfg.z[3]))
        throw DomainError("ConditionViolated:B",
                          "z3 is closer to the hub than to the triple");

    const cplx origin{};
    std::vector<AnchoredPair> anchored;
    anchored.reserve(4);
    for (int k = 1; k <= 4; ++k) anchored.push_back(anchor_pair(cfg, k, origin));

    ConventionFingerprint fp = default_fingerprint(cfg, origin);
    Atlas atlas;
    atlas.mode = AtlasMode::single_point;
    for (int k = 1; k <= 4; ++k) {
        const PairEval& e = anchored[k - 1].values;
        ConnectionMatrix c;
        c.entries = {e.f1, e.d1, e.f2, e.d2};
        c.source_center = cfg.z[k - 1];
        c.target_center = origin;
        c.convention = fp;
        atlas.base.push_back(c);
    }
    for (auto [k, l] : pair_order) {
        atlas.pairwise.push_back(matrix_from_values(anchored[k - 1].values,
                                                    anchored[l - 1].values,
                                                    cfg.z[k - 1], cfg.z[l - 1], fp));
        std::string label = "direct: common basis at the origin";
        for (int idx : {k, l})
            if (!anchored[idx - 1].direct)
                label += "; disc " + std::to_string(idx) + " continued";
        atlas.provenance.push_back(label);
        atlas.max_residual = std::max(
            atlas.max_residual,
            reconstruction_anchored(cfg, atlas.pairwise.back(), k, l,
                                    anchored[k - 1], anchored[l - 1]));
    }
    return atlas;
}

Atlas multi_center_atlas(const SymmetricHeunConfig& cfg) {
    series::validate(cfg);
    if (!regions::condition_a_points(cfg.z[0], cfg.z[1], cfg.z[3]))
        throw DomainError("ConditionViolated:A",
                          "triple (z1, z2, z4) fails the chord condition");

    constexpr std::array<std::array<int, 3>, 4> triples{
        {{1, 2, 4}, {1, 2, 3}, {1, 3, 4}, {2, 3, 4}}};

    Atlas atlas;
    atlas.mode = AtlasMode::multi_center;
    atlas.pairwise.resize(6);
    atlas.provenance.assign(6, "");

    bool any_center = false;
    for (const auto& t : triples) {
        geometry::Circle circ;
        try {
            circ = geometry::circumcircle(cfg.z[t[0] - 1], cfg.z[t[1] - 1],
                                          cfg.z[t[2] - 1]);
        } catch (const DegeneracyError&) {
            continue;
        }
        bool admissible = true;
        for (int j : t) {
            cplx zj = cfg.z[j - 1];
            if (std::abs(circ.center - zj) > admission_factor * disc_radius(cfg, j) ||
                !(ray_distance(zj, circ.center) > 0.0))
                admissible = false;
        }
        if (!admissible) continue;
        any_center = true;

        std::string label = "direct: triple (" + std::to_string(t[0]) + "," +
                            std::to_string(t[1]) + "," + std::to_string(t[2]) +
                            ") center";
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                int slot = pair_slot(t[a], t[b]);
                if (!atlas.provenance[slot].empty()) continue;
                atlas.pairwise[slot] =
                    connection_matrix(cfg, t[a], t[b], circ.center);
                atlas.provenance[slot] = label;
                atlas.max_residual = std::max(
                    atlas.max_residual,
                    reconstruction_residual(cfg, atlas.pairwise[slot], t[a], t[b]));
            }
        }
    }
    if (!any_center)
        throw DomainError("CenterOutsideDiscs",
                          "no triple circumcenter is admissible for its discs");

    // Compose the remaining pairs along shortest chains of direct edges.
    for (int idx = 0; idx < 6; ++idx) {
        if (!atlas.provenance[idx].empty()) continue;
        auto [from, to] = pair_order[idx];

        std::array<int, 5> parent;
        parent.fill(0);
        parent[from] = from;
        std::queue<int> frontier;
        frontier.push(from);
        while (!frontier.empty() && parent[to] == 0) {
            int cur = frontier.front();
            frontier.pop();
            for (int next = 1; next <= 4; ++next) {
                if (next == cur || parent[next] != 0) continue;
                const std::string& edge = atlas.provenance[pair_slot(cur, next)];
                if (edge.empty() || edge[0] != 'd') continue;
                parent[next] = cur;
                frontier.push(next);
            }
        }
        if (parent[to] == 0)
            throw DomainError("NoChain",
                              "no chain of admissible triples connects " +
                                  std::to_string(from) + " and " + std::to_string(to));

        std::vector<int> path{to};
        while (path.back() != from) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());

        Mat2 acc = Mat2::identity();
        std::string label = "composed:";
        for (std::size_t step = 0; step + 1 < path.size(); ++step) {
            int a = path[step], b = path[step + 1];
            const ConnectionMatrix& stored = atlas.pairwise[pair_slot(a, b)];
            ConnectionMatrix hop = (a < b) ? stored : invert_matrix(stored);
            acc = mat_mul(acc, as_mat(hop));
            label += " " + std::to_string(a) + "-" + std::to_string(b);
        }
        label += " (unverified)";

        ConnectionMatrix composed;
        composed.entries = acc.m;
        composed.source_center = cfg.z[from - 1];
        composed.target_center = cfg.z[to - 1];
        composed.convention =
            atlas.pairwise[pair_slot(path[0], path[1])].convention;
        composed.dual_path_residual = -1.0;
        atlas.pairwise[idx] = composed;
        atlas.provenance[idx] = label;
    }
    return atlas;
}

}  // namespace heun::connection
