#include "mvns/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "mvns/krylov.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/transform.hpp"

namespace mvns {

OperatorBundle OperatorBundle::build(const DomainMotion& motion, double t, double t0, const Grid& grid) {
    OperatorBundle b;
    b.motion = motion;
    b.grid = grid;
    b.t = t;
    b.t0 = t0;
    b.sample = evaluate_composite(motion, t, t0, grid);
    b.metric = metric_tensors(b.sample);
    for (int l = 0; l < 2; ++l) {
        b.coeffs[l].reserve(b.sample.pts[l].size());
        for (const auto& p : b.sample.pts[l]) {
            const PointCoeffs pc = lh_sharp_coefficients(p);
            std::array<double, 12> row{};
            for (int k = 0; k < 2; ++k)
                for (int a = 0; a < 6; ++a) row[6 * k + a] = pc.coef[l][k][a];
            b.coeffs[l].push_back(row);
        }
    }
    return b;
}

VectorField apply_Lh_sharp(const VectorField& v, const OperatorBundle& b) {
    require_same_grid(v.grid, b.grid);
    const Grid& g = v.grid;
    VectorField out(g);
    for (int l = 0; l < 2; ++l) {
        const Array2 f0 = gather(v, 0, l), f1 = gather(v, 1, l);
        const Array2* f[2] = {&f0, &f1};
        for (int j = 0; j < g.ny(l); ++j)
            for (int i = 0; i < g.nx(l); ++i) {
                if (g.on_wall(l, i, j)) continue;
                const auto& row = b.coeffs[l][std::size_t(j) * g.nx(l) + i];
                double s = 0.0;
                for (int k = 0; k < 2; ++k) {
                    const auto d = derivatives(*f[k], g, l, i, j);
                    for (int a = 0; a < 6; ++a) s += row[6 * k + a] * d[a];
                }
                out.c[l](i, j) = s;
            }
    }
    return out;
}

namespace {

/// Interior covariant gradient rows on grid l: G[a][c] = (nabla_c v)_a plus collocated values.
struct LocalGrad {
    double val[2];
    double G[2][2];
};

LocalGrad local_grad(const Array2* f[2], const Grid& g, const PointMetric& pm, int l, int i, int j) {
    LocalGrad lg;
    lg.val[0] = (*f[0])(i, j);
    lg.val[1] = (*f[1])(i, j);
    for (int a = 0; a < 2; ++a) {
        const auto d = first_derivatives(*f[a], g, l, i, j);
        for (int c = 0; c < 2; ++c)
            lg.G[a][c] = d[c] + pm.gamma[a][c][0] * lg.val[0] + pm.gamma[a][c][1] * lg.val[1];
    }
    return lg;
}

}  // namespace

VectorField apply_M(const VectorField& v, const OperatorBundle& b) {
    require_same_grid(v.grid, b.grid);
    const Grid& g = v.grid;
    VectorField out(g);
    for (int l = 0; l < 2; ++l) {
        const Array2 f0 = gather(v, 0, l), f1 = gather(v, 1, l);
        const Array2* f[2] = {&f0, &f1};
        for (int j = 0; j < g.ny(l); ++j)
            for (int i = 0; i < g.nx(l); ++i) {
                if (g.on_wall(l, i, j)) continue;
                const PointGeom& p = b.sample.at(l, i, j);
                const LocalGrad lg = local_grad(f, g, b.metric.at(l, i, j), l, i, j);
                // d rbar / dt at r(t,y) equals -Jinv dr/dt.
                double rbar_t[2];
                for (int k = 0; k < 2; ++k) rbar_t[k] = -(p.Jinv[k][0] * p.rt[0] + p.Jinv[k][1] * p.rt[1]);
                double s = rbar_t[0] * lg.G[l][0] + rbar_t[1] * lg.G[l][1];
                for (int k = 0; k < 2; ++k)
                    for (int q = 0; q < 2; ++q) s += p.Jinv[l][k] * p.Jt[k][q] * lg.val[q];
                out.c[l](i, j) = s;
            }
    }
    return out;
}

VectorField nonlinear_N(const VectorField& v, const OperatorBundle& b) {
    require_same_grid(v.grid, b.grid);
    const Grid& g = v.grid;
    VectorField out(g);
    for (int l = 0; l < 2; ++l) {
        const Array2 f0 = gather(v, 0, l), f1 = gather(v, 1, l);
        const Array2* f[2] = {&f0, &f1};
        for (int j = 0; j < g.ny(l); ++j)
            for (int i = 0; i < g.nx(l); ++i) {
                if (g.on_wall(l, i, j)) continue;
                const LocalGrad lg = local_grad(f, g, b.metric.at(l, i, j), l, i, j);
                out.c[l](i, j) = lg.val[0] * lg.G[l][0] + lg.val[1] * lg.G[l][1];
            }
    }
    return out;
}

VectorField apply_P0h(const VectorField& v, const OperatorBundle& b, double proj_tol) {
    return leray_project(apply_h(v, b.metric), proj_tol);
}

VectorField solve_P0h(const VectorField& w, const OperatorBundle& b, double tol, SolveStats* stats) {
    const LinOp A = [&](const VectorField& x) { return apply_P0h(x, b); };
    return leray_project(cg(A, nullptr, w, w, tol, 500, stats), 1e-12);
}

double cutoff_gN(double r, const CutoffLevel& N) {
    if (!(r >= 0.0)) throw std::invalid_argument("cutoff_gN: r must be nonnegative");
    if (!(N.N > 0.0)) throw std::invalid_argument("cutoff_gN: N must be positive");
    if (r <= N.N) return 1.0;
    double g = N.N / r;
    // Keep r * g <= N exactly in floating point.
    while (r * g > N.N) g = std::nextafter(g, 0.0);
    return g;
}

DriftTerms drift_terms(const VectorField& v, const OperatorBundle& b, std::optional<CutoffLevel> N, double tol) {
    DriftTerms d;
    d.g = N ? cutoff_gN(norm_1t(v, b.metric), *N) : 1.0;
    d.linear = solve_P0h(leray_project(apply_Lh_sharp(v, b), 1e-12), b, tol);
    d.advection = solve_P0h(apply_P0h(nonlinear_N(v, b), b), b, tol);
    d.advection *= -d.g;
    d.motion = solve_P0h(apply_P0h(apply_M(v, b), b), b, tol);
    d.motion *= -1.0;
    return d;
}

VectorField drift(const VectorField& v, const OperatorBundle& b, std::optional<CutoffLevel> N, double tol) {
    DriftTerms d = drift_terms(v, b, N, tol);
    VectorField out = d.linear;
    out += d.advection;
    out += d.motion;
    return out;
}

double stokes_deviation(const OperatorBundle& b, const std::vector<VectorField>& probes) {
    if (probes.empty()) throw std::invalid_argument("stokes_deviation: empty probe set");
    const OperatorBundle base = OperatorBundle::build(b.motion, b.t0, b.t0, b.grid);
    double worst = 0.0;
    for (const auto& v : probes) {
        const double nv = norm_H2(v);
        if (!(nv > 0.0)) throw std::invalid_argument("stokes_deviation: zero probe");
        VectorField diff = apply_Lh_sharp(v, b);
        diff -= apply_Lh_sharp(v, base);
        worst = std::max(worst, norm_L2(diff) / nv);
    }
    return worst;
}

std::vector<VectorField> default_probes(const Grid& g) {
    std::vector<VectorField> probes;
    auto bump = [](double x, double y) {
        const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
        return b * b * b;
    };
    probes.push_back(discrete_curl(g, [&](double x, double y) { return bump(x, y); }));
    probes.push_back(discrete_curl(g, [&](double x, double y) { return bump(x, y) * (x - 0.5); }));
    probes.push_back(discrete_curl(g, [&](double x, double y) { return bump(x, y) * (y - 0.5); }));
    probes.push_back(discrete_curl(g, [&](double x, double y) { return bump(x, y) * (x - 0.5) * (y - 0.5); }));
    return probes;
}

}  // namespace mvns
