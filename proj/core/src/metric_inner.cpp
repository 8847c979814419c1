#include "mvns/metric_inner.hpp"

#include <cmath>

#include "mvns/transform.hpp"

namespace mvns {

double inner_1t(const VectorField& v, const VectorField& w, const MetricData& m) {
    require_same_grid(v.grid, w.grid);
    const Grid& g = v.grid;
    const CovariantGradient gv = covariant_gradient(v, m);
    const CovariantGradient gw = (&v == &w) ? gv : covariant_gradient(w, m);
    double total = 0.0;
    for (int s = 0; s < 2; ++s) {
        double sum = 0.0;
        for (int j = 0; j < g.ny(s); ++j)
            for (int i = 0; i < g.nx(s); ++i) {
                const PointMetric& pm = m.at(s, i, j);
                double q = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int k = 0; k < 2; ++k)
                            for (int l = 0; l < 2; ++l)
                                q += pm.hinv[k][l] * pm.h[a][b] * gv.g[s][2 * a + k](i, j) * gw.g[s][2 * b + l](i, j);
                sum += g.weight(s, i, j) * q;
            }
        total += 0.5 * sum;
    }
    return total;
}

double norm_1t(const VectorField& v, const MetricData& m) { return std::sqrt(std::max(0.0, inner_1t(v, v, m))); }

namespace {

Array2 interpolate(const Array2& f, const Grid& g, int from, int to) {
    VectorField tmp(g);
    tmp.c[from] = f;
    return gather(tmp, from, to);
}

template <class Get>
VectorField apply_sym(const VectorField& v, const MetricData& m, Get get) {
    require_same_grid(v.grid, m.grid);
    const Grid& g = v.grid;
    VectorField out(g);
    for (int l = 0; l < 2; ++l) {
        const int k = 1 - l;
        const Array2 vk_at_l = gather(v, k, l);
        // h_lk sampled on the k grid times v_k, carried over to the l grid.
        Array2 hv_k(g.nx(k), g.ny(k));
        for (int j = 0; j < g.ny(k); ++j)
            for (int i = 0; i < g.nx(k); ++i) hv_k(i, j) = get(m.at(k, i, j))[l][k] * v.c[k](i, j);
        const Array2 hv_k_at_l = interpolate(hv_k, g, k, l);
        for (int j = 0; j < g.ny(l); ++j)
            for (int i = 0; i < g.nx(l); ++i) {
                const auto& h = get(m.at(l, i, j));
                out.c[l](i, j) = h[l][l] * v.c[l](i, j) + 0.5 * (h[l][k] * vk_at_l(i, j) + hv_k_at_l(i, j));
            }
    }
    return out;
}

}  // namespace

VectorField apply_h(const VectorField& v, const MetricData& m) {
    return apply_sym(v, m, [](const PointMetric& p) -> const double(&)[2][2] { return p.h; });
}

VectorField apply_dh_dt(const VectorField& v, const MetricData& m) {
    return apply_sym(v, m, [](const PointMetric& p) -> const double(&)[2][2] { return p.dh_dt; });
}

double inner_0t(const VectorField& v, const VectorField& w, const MetricData& m) {
    return inner_L2(apply_h(v, m), w);
}

double norm_0t(const VectorField& v, const MetricData& m) { return std::sqrt(std::max(0.0, inner_0t(v, v, m))); }

MetricData identity_metric(const Grid& g) {
    return metric_tensors(evaluate_motion(DomainMotion::identity(0.0), 0.0, g));
}

}  // namespace mvns
