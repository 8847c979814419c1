#include "mvns/transform.hpp"

#include <cmath>

namespace mvns {

StaggeredSamples::StaggeredSamples(const Grid& g) : grid(g) {
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 2; ++k) v[s][k] = Array2(g.nx(s), g.ny(s));
}

StaggeredSamples collocate(const VectorField& f) {
    StaggeredSamples out(f.grid);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 2; ++k) out.v[s][k] = gather(f, k, s);
    return out;
}

VectorField to_vector_field(const StaggeredSamples& s) {
    VectorField v(s.grid);
    v.c[0] = s.v[0][0];
    v.c[1] = s.v[1][1];
    return v;
}

namespace {

StaggeredSamples apply_matrix(const StaggeredSamples& u, const MotionSample& ms, bool inverse) {
    require_same_grid(u.grid, ms.grid);
    StaggeredSamples out(u.grid);
    for (int s = 0; s < 2; ++s) {
        const std::size_t np = ms.pts[s].size();
        for (std::size_t q = 0; q < np; ++q) {
            const PointGeom& p = ms.pts[s][q];
            const auto& M = inverse ? p.Jinv : p.J;
            const double a = u.v[s][0].a[q], b = u.v[s][1].a[q];
            out.v[s][0].a[q] = M[0][0] * a + M[0][1] * b;
            out.v[s][1].a[q] = M[1][0] * a + M[1][1] * b;
        }
    }
    return out;
}

}  // namespace

StaggeredSamples piola_forward(const StaggeredSamples& u, const MotionSample& s) { return apply_matrix(u, s, true); }

StaggeredSamples piola_inverse(const StaggeredSamples& v, const MotionSample& s) { return apply_matrix(v, s, false); }

VectorField piola_forward_field(const StaggeredSamples& u, const MotionSample& s) {
    return to_vector_field(piola_forward(u, s));
}

StaggeredSamples piola_inverse_field(const VectorField& v, const MotionSample& s) {
    return piola_inverse(collocate(v), s);
}

CovariantGradient covariant_gradient(const VectorField& v, const MetricData& m) {
    require_same_grid(v.grid, m.grid);
    const Grid& g = v.grid;
    CovariantGradient cg;
    cg.grid = g;
    for (int s = 0; s < 2; ++s) {
        const Array2 f0 = gather(v, 0, s), f1 = gather(v, 1, s);
        const Array2* f[2] = {&f0, &f1};
        for (int e = 0; e < 4; ++e) cg.g[s][e] = Array2(g.nx(s), g.ny(s));
        for (int j = 0; j < g.ny(s); ++j)
            for (int i = 0; i < g.nx(s); ++i) {
                const PointMetric& pm = m.at(s, i, j);
                const double val[2] = {(*f[0])(i, j), (*f[1])(i, j)};
                for (int a = 0; a < 2; ++a) {
                    const auto d = first_derivatives(*f[a], g, s, i, j);
                    for (int b = 0; b < 2; ++b)
                        cg.g[s][2 * a + b](i, j) = d[b] + pm.gamma[a][b][0] * val[0] + pm.gamma[a][b][1] * val[1];
                }
            }
    }
    return cg;
}

DivergenceReport check_divergence_free(const VectorField& v, double tol) {
    DivergenceReport r;
    r.max_abs = max_abs(divergence(v));
    r.ok = r.max_abs <= tol;
    return r;
}

}  // namespace mvns
