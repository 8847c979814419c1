#include "mvns/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "mvns/krylov.hpp"
#include "mvns/spectral.hpp"

namespace mvns::oracle {

namespace {

/// f at (i,j) with no-slip odd reflection past the walls parallel to component c.
double ghost(const Array2& f, int n, int c, int i, int j) {
    if (c == 0 && j < 0) return -f(i, 0);
    if (c == 0 && j >= n) return -f(i, n - 1);
    if (c == 1 && i < 0) return -f(0, j);
    if (c == 1 && i >= n) return -f(n - 1, j);
    return f(i, j);
}

}  // namespace

VectorField advection(const VectorField& v) {
    const Grid& g = v.grid;
    const int n = g.n;
    const double r = 0.5 / g.dx;
    const Array2& u = v.c[0];
    const Array2& w = v.c[1];
    VectorField out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const double wbar = 0.25 * (w(i - 1, j) + w(i, j) + w(i - 1, j + 1) + w(i, j + 1));
            const double ux = (u(i + 1, j) - u(i - 1, j)) * r;
            const double uy = (ghost(u, n, 0, i, j + 1) - ghost(u, n, 0, i, j - 1)) * r;
            out.c[0](i, j) = u(i, j) * ux + wbar * uy;
        }
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double ubar = 0.25 * (u(i, j - 1) + u(i + 1, j - 1) + u(i, j) + u(i + 1, j));
            const double wx = (ghost(w, n, 1, i + 1, j) - ghost(w, n, 1, i - 1, j)) * r;
            const double wy = (w(i, j + 1) - w(i, j - 1)) * r;
            out.c[1](i, j) = ubar * wx + w(i, j) * wy;
        }
    return out;
}

VectorField oracle_step(const VectorField& v, double dt, const VectorField* forcing, const OracleOptions& opt) {
    if (!(dt > 0.0)) throw std::invalid_argument("oracle_step: dt must be positive");
    VectorField rhs = v;
    rhs.axpy(-dt, advection(v));
    if (forcing) rhs += *forcing;
    const VectorField b = leray_project(rhs, opt.proj_tol);
    const LinOp A = [&](const VectorField& x) {
        VectorField y = x;
        y.axpy(-dt, laplacian(x));
        return leray_project(y, opt.proj_tol);
    };
    const LinOp K = [&](const VectorField& y) { return leray_project(spectral::helmholtz_solve(y, 1.0, dt), opt.proj_tol); };
    VectorField x = cg(A, K, b, v, opt.solve_tol, opt.max_iter);
    x = leray_project(x, opt.proj_tol);
    if (!x.finite()) throw SolverError("oracle_step: non-finite state", 0, 0.0);
    return x;
}

namespace {

TrajectoryRow sample_row(std::uint64_t step, double t, const VectorField& v) {
    TrajectoryRow r;
    r.kind = "sample";
    r.step = step;
    r.t = t;
    r.N = std::numeric_limits<double>::infinity();
    r.norm_0t = norm_L2(v);
    r.norm_1t = seminorm_H1(v);
    r.theta = std::log1p(std::log1p(r.norm_1t * r.norm_1t));
    return r;
}

}  // namespace

Trajectory oracle_trajectory(const OracleConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("oracle_trajectory: dt and T must be positive");
    const std::uint64_t nsteps = std::uint64_t(std::llround(cfg.T / cfg.dt));
    const int every = std::max(1, cfg.sample_every);
    Trajectory tr;
    VectorField v = leray_project(cfg.v0, cfg.opt.proj_tol);
    tr.rows.push_back(sample_row(0, 0.0, v));
    tr.snapshots.push_back({0.0, 0, v});
    tr.theta_sup = tr.rows.back().theta;
    for (std::uint64_t s = 0; s < nsteps; ++s) {
        std::optional<VectorField> forcing;
        if (cfg.noise && cfg.noise->K > 0) {
            const NoiseModel& nm = *cfg.noise;
            const std::vector<double> dW = sample_increments(cfg.seed, s, cfg.dt, nm.K);
            VectorField f(cfg.grid);
            for (int k = 0; k < nm.K; ++k) {
                const VectorField& e = nm.modes[std::size_t(k)];
                double c = nm.weight[std::size_t(k)];
                if (nm.coupling == Coupling::Multiplicative) c *= inner_L2(v, e) / inner_L2(e, e);
                f.axpy(c * dW[std::size_t(k)], e);
            }
            forcing = std::move(f);
        }
        v = oracle_step(v, cfg.dt, forcing ? &*forcing : nullptr, cfg.opt);
        const std::uint64_t step = s + 1;
        const double t = double(step) * cfg.dt;
        const double n1 = seminorm_H1(v);
        tr.dissipation += cfg.dt * n1 * n1;
        if (step % std::uint64_t(every) == 0 || step == nsteps) {
            TrajectoryRow r = sample_row(step, t, v);
            r.dissipation = tr.dissipation;
            tr.rows.push_back(r);
            tr.snapshots.push_back({t, step, v});
        }
        tr.theta_sup = std::max(tr.theta_sup, std::log1p(std::log1p(n1 * n1)));
    }
    tr.state.t = double(nsteps) * cfg.dt;
    tr.state.step = nsteps;
    tr.state.v = v;
    tr.state.seed = cfg.seed;
    return tr;
}

}  // namespace mvns::oracle
