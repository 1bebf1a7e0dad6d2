#include <algorithm>
#include <cmath>

#include "heun/series.hpp"

namespace heun::series {

namespace {

using geometry::MoebiusMap;

cplx moebius_at(const MoebiusMap& m, cplx z) {
    return (m.a_coef * z + m.b_coef) / (m.c_coef * z + m.d_coef);
}

cplx moebius_deriv(const MoebiusMap& m, cplx z) {
    cplx den = m.c_coef * z + m.d_coef;
    return m.det() / (den * den);
}

}  // namespace

StandardFormMap standard_form_map(const SymmetricHeunConfig& cfg) {
    validate(cfg);
    DerivedParams dp = derived_params(cfg);
    const auto& z = cfg.z;

    StandardFormMap out;
    // Canonical map: z_1 -> 0, z_2 -> 1, z_4 -> infinity, hence z_3 -> a.
    out.moebius = geometry::canonical_map(z[0], z[1], z[3]);
    cplx a = geometry::cross_ratio(z[0], z[1], z[2], z[3]);

    // The prefactor prod_k (z - z_k)^{nu_k} must strip the alpha-branch
    // exponent at each of z_1, z_2, z_3 (whose images 0, 1, a carry local
    // exponent 0 on the first branch) and keep the sum of the nu_k zero so
    // that infinity stays the image of z_4.
    out.nu = {dp.alpha[0], dp.alpha[1], dp.alpha[2],
              -dp.alpha[0] - dp.alpha[1] - dp.alpha[2]};

    StandardHeunParams p;
    p.a = a;
    p.gamma = 1.0 + dp.alpha[0] - dp.beta[0];
    p.delta = 1.0 + dp.alpha[1] - dp.beta[1];
    p.epsilon = 1.0 + dp.alpha[2] - dp.beta[2];
    p.alpha = dp.alpha[0] + dp.alpha[1] + dp.alpha[2] + dp.alpha[3];
    p.beta = dp.beta[3] + dp.alpha[0] + dp.alpha[1] + dp.alpha[2];

    // Accessory parameter: the conjugated equation H'' + p_H H' + q_H H = 0
    // has q_H(x) = (L2 + p_F L1 + q_F) / x'(z)^2 |_{z = z(x)} with
    // L1 = sum nu_k/(z - z_k), L2 = L1^2 - sum nu_k/(z - z_k)^2, and the
    // standard form requires q_H = (alpha beta x - q) / (x(x-1)(x-a)).
    // Solve for q at several regular sample points and demand agreement.
    auto q_at = [&](cplx zs) {
        cplx l1{}, l1sq_term{};
        for (int k = 0; k < 4; ++k) {
            cplx d = zs - z[k];
            l1 += out.nu[k] / d;
            l1sq_term += out.nu[k] / (d * d);
        }
        cplx l2 = l1 * l1 - l1sq_term;

        cplx pf{}, qf = cfg.lambda, prod{1.0};
        for (int k = 0; k < 4; ++k) {
            pf += 0.5 / (zs - z[k]);
            qf += dp.q[k] / (zs - z[k]);
            prod *= zs - z[k];
        }
        qf /= prod;

        cplx x = moebius_at(out.moebius, zs);
        cplx dx = moebius_deriv(out.moebius, zs);
        cplx qh = (l2 + pf * l1 + qf) / (dx * dx);
        return p.alpha * p.beta * x - qh * x * (x - 1.0) * (x - a);
    };

    // Deterministic candidates on rings around the centroid; keep points
    // away from the singular set and with images away from {0, 1, a}.
    cplx centroid = 0.25 * (z[0] + z[1] + z[2] + z[3]);
    double d_min = std::abs(z[0] - z[1]);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            d_min = std::min(d_min, std::abs(z[i] - z[j]));

    std::vector<cplx> samples;
    for (int m = 0; m < 64 && samples.size() < 4; ++m) {
        double r = (0.3 + 0.5 * double(m % 7) / 7.0) * d_min;
        cplx zs = centroid + std::polar(r, 2.39996322972865332 * double(m));
        bool ok = true;
        for (int k = 0; k < 4; ++k)
            if (std::abs(zs - z[k]) < 0.15 * d_min) ok = false;
        if (!ok) continue;
        cplx den = out.moebius.c_coef * zs + out.moebius.d_coef;
        if (std::abs(den) < 1e-8) continue;
        cplx x = moebius_at(out.moebius, zs);
        double ascale = std::max(1.0, std::abs(a));
        if (std::abs(x) < 1e-3 * ascale || std::abs(x - 1.0) < 1e-3 * ascale ||
            std::abs(x - a) < 1e-3 * ascale || std::abs(x) > 1e6)
            continue;
        samples.push_back(zs);
    }
    if (samples.size() < 2)
        throw DegeneracyError("DegenerateConfig",
                              "no admissible sample points for accessory "
                              "parameter extraction");

    cplx q_sum{};
    std::vector<cplx> qs;
    for (const auto& zs : samples) {
        qs.push_back(q_at(zs));
        q_sum += qs.back();
    }
    cplx q_mean = q_sum / double(qs.size());
    double spread = 0.0;
    for (const auto& qv : qs) spread = std::max(spread, std::abs(qv - q_mean));
    if (spread > 1e-6 * std::max(1.0, std::abs(q_mean)))
        throw ConvergenceError("NotConverged",
                               "accessory parameter extraction inconsistent "
                               "across sample points");
    p.q = q_mean;

    out.params = p;
    return out;
}

}  // namespace heun::series
