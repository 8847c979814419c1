#include "mvns/sde.hpp"

#include <cmath>
#include <stdexcept>

#include "mvns/diagnostics.hpp"
#include "mvns/krylov.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/spectral.hpp"

namespace mvns {

std::uint64_t SimulationConfig::total_steps() const { return std::uint64_t(std::llround(T / dt)); }

SolverState step(const SolverState& state, double dt, const OperatorBundle& b, const NoiseModel& noise,
                 const StepOptions& opt) {
    if (std::abs(b.t - state.t) > 1e-12 || std::abs(b.t0 - state.t0) > 1e-12)
        throw std::invalid_argument("step: bundle not evaluated at the state time");
    const VectorField& v = state.v;
    const MetricData& m = b.metric;

    const double g = std::isfinite(state.N.N) ? cutoff_gN(norm_1t(v, m), state.N) : 1.0;
    VectorField rhs = v;
    rhs.axpy(-dt * g, nonlinear_N(v, b));
    rhs.axpy(-dt, apply_M(v, b));
    if (noise.K > 0) rhs += apply_noise(v, noise, sample_increments(state.seed, state.step, dt, noise.K), m, opt.proj_tol);

    const VectorField bvec = leray_project(apply_h(rhs, m), opt.proj_tol);
    const LinOp A = [&](const VectorField& x) {
        VectorField y = apply_h(x, m);
        y.axpy(-dt, apply_Lh_sharp(x, b));
        return leray_project(y, opt.proj_tol);
    };
    const LinOp K = [&](const VectorField& y) { return leray_project(spectral::helmholtz_solve(y, 1.0, dt), opt.proj_tol); };

    SolverState next = state;
    try {
        next.v = leray_project(gmres(A, K, bvec, v, opt.solve_tol, opt.restart, opt.max_iter), opt.proj_tol);
    } catch (const SolverError& e) {
        throw NumericalError(std::string("implicit solve failed: ") + e.what());
    }
    if (!next.v.finite()) throw NumericalError("non-finite velocity after step " + std::to_string(state.step));
    next.step = state.step + 1;
    next.t = double(next.step) * dt;
    return next;
}

bool detect_stopping(const SolverState& state, const MetricData& m) {
    if (!std::isfinite(state.N.N)) return false;
    return norm_1t(state.v, m) > state.N.N;
}

bool escalate(SolverState& state, double ceiling) {
    const double next = 2.0 * state.N.N;
    if (next > ceiling) return false;
    state.N.N = next;
    return true;
}

namespace {

TrajectoryRow make_row(const char* kind, const SolverState& s, double n0, double n1, double diss) {
    TrajectoryRow r;
    r.kind = kind;
    r.step = s.step;
    r.t = s.t;
    r.t0 = s.t0;
    r.N = s.N.N;
    r.norm_0t = n0;
    r.norm_1t = n1;
    r.theta = theta(n1 * n1);
    r.dissipation = diss;
    return r;
}

bool forced_at(const SimulationConfig& cfg, std::uint64_t step) {
    if (step == 0) return false;
    for (double ft : cfg.forced_times)
        if (std::uint64_t(std::llround(ft / cfg.dt)) == step) return true;
    return false;
}

void check_stopping(const SimulationConfig& cfg, Trajectory& tr, SolverState& s, double n0, double n1) {
    if (!cfg.escalate || tr.ceiling_hit) return;
    while (std::isfinite(s.N.N) && n1 > s.N.N) {
        tr.tau_hits.push_back(s.t);
        if (!escalate(s, cfg.N_ceiling)) {
            tr.ceiling_hit = true;
            tr.rows.push_back(make_row("ceiling", s, n0, n1, tr.dissipation));
            return;
        }
        tr.rows.push_back(make_row("escalate", s, n0, n1, tr.dissipation));
    }
}

}  // namespace

Trajectory simulate(const SimulationConfig& cfg, std::uint64_t seed, const StepHook& hook) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("simulate: dt and T must be positive");
    Trajectory tr;
    SolverState s;
    s.seed = seed;
    s.N.N = cfg.N0;
    s.v = leray_project(cfg.v0, cfg.step.proj_tol);
    const OperatorBundle b = OperatorBundle::build(cfg.motion, 0.0, 0.0, cfg.grid);
    const double n1 = norm_1t(s.v, b.metric), n0 = norm_0t(s.v, b.metric);
    tr.theta_sup = theta(n1 * n1);
    check_stopping(cfg, tr, s, n0, n1);
    tr.rows.push_back(make_row("sample", s, n0, n1, 0.0));
    if (cfg.snapshot_every > 0) tr.snapshots.push_back({s.t, s.step, s.v});
    tr.state = s;
    return resume(cfg, std::move(tr), hook);
}

Trajectory resume(const SimulationConfig& cfg, Trajectory tr, const StepHook& hook) {
    const std::uint64_t nsteps = cfg.total_steps();
    const std::vector<VectorField> probes =
        cfg.rereference == RereferenceMode::Auto ? default_probes(cfg.grid) : std::vector<VectorField>{};
    SolverState s = tr.state;
    OperatorBundle b = OperatorBundle::build(cfg.motion, s.t, s.t0, cfg.grid);
    while (s.step < nsteps) {
        bool move = cfg.rereference == RereferenceMode::Forced && forced_at(cfg, s.step);
        double deviation = 0.0;
        if (cfg.rereference == RereferenceMode::Auto && s.t > s.t0) {
            const RereferenceDecision d = evaluate_rereference(cfg.policy, cfg.motion, s.t0, s.t, cfg.grid, b, probes);
            move = d.trigger;
            deviation = d.deviation;
        }
        if (move) {
            const double old_t0 = s.t0;
            s = rereference(s, cfg.motion, s.t);
            b = OperatorBundle::build(cfg.motion, s.t, s.t0, cfg.grid);
            TrajectoryRow r = make_row("rereference", s, norm_0t(s.v, b.metric), norm_1t(s.v, b.metric), tr.dissipation);
            r.old_t0 = old_t0;
            r.deviation = deviation;
            tr.rows.push_back(r);
            tr.rereference_times.push_back(s.t);
        }

        s = step(s, cfg.dt, b, cfg.noise, cfg.step);
        b = OperatorBundle::build(cfg.motion, s.t, s.t0, cfg.grid);
        const double n1 = norm_1t(s.v, b.metric), n0 = norm_0t(s.v, b.metric);
        tr.dissipation += cfg.dt * n1 * n1;
        tr.theta_sup = std::max(tr.theta_sup, theta(n1 * n1));
        check_stopping(cfg, tr, s, n0, n1);
        if (s.step % std::uint64_t(std::max(1, cfg.sample_every)) == 0 || s.step == nsteps)
            tr.rows.push_back(make_row("sample", s, n0, n1, tr.dissipation));
        if (cfg.snapshot_every > 0 && s.step % std::uint64_t(cfg.snapshot_every) == 0)
            tr.snapshots.push_back({s.t, s.step, s.v});
        tr.state = s;
        if (hook && !hook(s, tr)) break;
    }
    return tr;
}

StaggeredSamples physical_velocity(const SolverState& state, const DomainMotion& motion) {
    return piola_inverse_field(state.v, evaluate_composite(motion, state.t, state.t0, state.v.grid));
}

}  // namespace mvns
