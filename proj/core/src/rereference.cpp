#include "mvns/rereference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mvns/transform.hpp"

namespace mvns {

void ReferencePolicy::validate() const {
    if (!(safety > 0.0 && safety < 1.0)) throw std::invalid_argument("policy.safety must lie in (0,1)");
    if (!(C0 > 0.0) || !std::isfinite(C0)) throw std::invalid_argument("policy.C0 must be positive");
    if (!(max_interval > 0.0)) throw std::invalid_argument("policy.max_interval must be positive");
    if (!(proxy_calibration > 0.0)) throw std::invalid_argument("policy.proxy_calibration must be positive");
}

RereferenceDecision evaluate_rereference(const ReferencePolicy& policy, const DomainMotion& motion, double t0, double t,
                                         const Grid& grid, const OperatorBundle& bundle,
                                         const std::vector<VectorField>& probes) {
    if (t < t0) throw std::invalid_argument("evaluate_rereference: t < t0");
    RereferenceDecision d;
    if (t == t0) return d;
    if (t - t0 >= policy.max_interval * (1.0 - 1e-12)) {
        d.trigger = true;
        d.by_interval = true;
    }
    d.drift = coefficient_drift(motion, t0, t, grid);
    if (!probes.empty()) d.deviation = stokes_deviation(bundle, probes);
    if (d.deviation >= policy.deviation_threshold() || d.drift > policy.proxy_threshold()) {
        d.trigger = true;
        d.by_interval = false;
    }
    return d;
}

bool should_rereference(const ReferencePolicy& policy, const DomainMotion& motion, double t0, double t,
                        const Grid& grid, const OperatorBundle& bundle) {
    return evaluate_rereference(policy, motion, t0, t, grid, bundle, default_probes(grid)).trigger;
}

SolverState rereference(const SolverState& state, const DomainMotion& motion, double t_new) {
    if (std::abs(t_new - state.t) > 1e-12) throw std::invalid_argument("rereference: t_new must equal state.t");
    SolverState out = state;
    if (t_new == state.t0) return out;
    const Grid& g = state.v.grid;
    const MotionSample old_s = evaluate_composite(motion, state.t, state.t0, g);
    const MotionSample new_s = evaluate_composite(motion, state.t, t_new, g);
    out.v = piola_forward_field(piola_inverse_field(state.v, old_s), new_s);
    out.v.clamp_walls();
    out.t0 = t_new;
    return out;
}

DeltaEstimate estimate_delta(const ReferencePolicy& policy, const DomainMotion& motion, const Grid& grid,
                             const std::vector<double>& time_samples, int steps_per_interval) {
    policy.validate();
    if (time_samples.empty()) throw std::invalid_argument("estimate_delta: no time samples");
    if (steps_per_interval < 2) throw std::invalid_argument("estimate_delta: steps_per_interval < 2");
    const DomainMotion m = motion.with_horizon(motion.t_max() + policy.max_interval);
    const std::vector<VectorField> probes = default_probes(grid);
    const double h = policy.max_interval / steps_per_interval;

    DeltaEstimate est;
    est.resolution = h;
    est.delta = policy.max_interval;
    for (double t0 : time_samples) {
        double first = policy.max_interval;
        for (int k = 1; k <= steps_per_interval; ++k) {
            const double t = k == steps_per_interval ? t0 + policy.max_interval : t0 + k * h;
            const OperatorBundle b = OperatorBundle::build(m, t, t0, grid);
            const RereferenceDecision d = evaluate_rereference(policy, m, t0, t, grid, b, probes);
            if (!d.trigger) continue;
            if (d.by_interval) break;
            if (k == 1)
                throw std::runtime_error("estimate_delta: trigger at the first scan step from t0 = " +
                                         std::to_string(t0) + "; refine the scan");
            first = k * h;
            break;
        }
        est.t0_samples.push_back(t0);
        est.first_trigger.push_back(first);
        est.delta = std::min(est.delta, first);
    }
    return est;
}

}  // namespace mvns
