#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "heun/series.hpp"

namespace heun::series::detail {

namespace {

using state_type = std::array<cplx, 2>;

// Distance from point s to the segment [a, b].
double segment_distance(cplx s, cplx a, cplx b) {
    cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(s - a);
    double t = ((s - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(s - (a + t * ab));
}

}  // namespace

std::array<cplx, 2> integrate_segment(
    const std::function<cplx(cplx)>& p, const std::function<cplx(cplx)>& q,
    const std::vector<cplx>& singular, double min_clearance, cplx start,
    std::array<cplx, 2> init, cplx end, double rtol) {
    if (start == end) return init;

    for (const auto& s : singular)
        if (segment_distance(s, start, end) < min_clearance)
            throw DomainError("PathTooCloseToSingularity",
                              "integration segment within clearance of a "
                              "singular point");

    // Parametrize z(t) = start + t (end - start), t in [0, 1]; the chain
    // factor turns the complex-plane equation into a real-time system.
    cplx dz = end - start;
    auto sys = [&](const state_type& y, state_type& dydt, double t) {
        cplx z = start + t * dz;
        dydt[0] = dz * y[1];
        dydt[1] = dz * (-p(z) * y[1] - q(z) * y[0]);
    };

    namespace ode = boost::numeric::odeint;
    using stepper_t = ode::runge_kutta_fehlberg78<state_type, double, state_type,
                                                  double, ode::range_algebra>;
    double scale = std::max({std::abs(init[0]), std::abs(init[1]), 1e-30});
    auto stepper = ode::make_controlled<stepper_t>(1e-13 * scale, rtol);

    state_type y = init;
    double t = 0.0, dt = 0.1;
    while (t < 1.0) {
        dt = std::min(dt, 1.0 - t);
        ode::controlled_step_result r = stepper.try_step(sys, y, t, dt);
        if (r == ode::fail && dt < 1e-15)
            throw ConvergenceError("StepUnderflow",
                                   "adaptive step size collapsed below 1e-15");
    }
    return y;
}

}  // namespace heun::series::detail
