#include <doctest.h>

#include <cmath>

#include "mvns/geometry.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/transform.hpp"
#include "test_support.hpp"

using namespace mvns;
using namespace mvns::testing;

TEST_CASE("collocation keeps native components") {
    const Grid g = Grid::make(16);
    const VectorField v = vortex(g);
    CHECK(bitwise_equal(to_vector_field(collocate(v)), v));
}

TEST_CASE("piola transforms are mutually inverse") {
    const Grid g = Grid::make(16);
    const VectorField v = vortex(g, 3.0);
    for (const auto& m : builtin_motions(1.0)) {
        const MotionSample s = evaluate_motion(m, 0.45, g);
        const VectorField back = piola_forward_field(piola_inverse_field(v, s), s);
        CHECK(rel_diff(back, v) < 1e-14);
    }
}

TEST_CASE("piola transform is a pointwise isometry of the moving metric") {
    const Grid g = Grid::make(16);
    const VectorField v = vortex(g, 2.0);
    const StaggeredSamples col = collocate(v);
    for (const auto& m : builtin_motions(1.0)) {
        const MotionSample s = evaluate_motion(m, 0.8, g);
        const MetricData md = metric_tensors(s);
        const StaggeredSamples phys = piola_inverse(col, s);
        double worst = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int j = 0; j < g.ny(c); ++j)
                for (int i = 0; i < g.nx(c); ++i) {
                    const double u[2] = {phys.v[c][0](i, j), phys.v[c][1](i, j)};
                    const double w[2] = {col.v[c][0](i, j), col.v[c][1](i, j)};
                    const PointMetric& pm = md.at(c, i, j);
                    double hw = 0.0;
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) hw += pm.h[a][b] * w[a] * w[b];
                    const double uu = u[0] * u[0] + u[1] * u[1];
                    worst = std::max(worst, std::abs(uu - hw) / std::max(1.0, uu));
                }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("covariant gradient reduces to plain differences without motion") {
    const Grid g = Grid::make(16);
    const VectorField v = vortex(g);
    const CovariantGradient cg = covariant_gradient(v, identity_metric(g));
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
            const Array2 f = gather(v, a, s);
            for (int j = 0; j < g.ny(s); ++j)
                for (int i = 0; i < g.nx(s); ++i) {
                    const auto d = first_derivatives(f, g, s, i, j);
                    CHECK(cg.g[s][2 * a](i, j) == d[0]);
                    CHECK(cg.g[s][2 * a + 1](i, j) == d[1]);
                }
        }
}

TEST_CASE("moving inner product of a Piola image is motion invariant in L2") {
    const Grid g = Grid::make(32);
    const VectorField v = vortex(g);
    const double ref = norm_0t(v, identity_metric(g));
    for (const auto& m : builtin_motions(1.0)) {
        const MetricData md = metric_tensors(evaluate_motion(m, 0.3, g));
        const double n0 = norm_0t(v, md);
        CHECK(n0 > 0.0);
        CHECK(std::isfinite(n0));
        if (m.kind() == MotionKind::Identity || m.kind() == MotionKind::Rotation)
            CHECK(n0 == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("divergence check") {
    const Grid g = Grid::make(16);
    CHECK(check_divergence_free(vortex(g), 1e-12).ok);
    const DivergenceReport r = check_divergence_free(rough_field(g, 3), 1e-6);
    CHECK_FALSE(r.ok);
    CHECK(r.max_abs > 1e-6);
}

TEST_CASE("transformed field is solenoidal to second order") {
    const double pi = std::acos(-1.0);
    const auto motion = DomainMotion::shear(0.3, 2.0, 1.0);
    const double t = 0.4;
    auto phi_grad = [&](double y1, double y2) {
        const double s1 = std::sin(pi * y1), s2 = std::sin(pi * y2);
        const double c1 = std::cos(pi * y1), c2 = std::cos(pi * y2);
        const double q = 1.0 + 0.5 * y1 - 0.25 * y2;
        const double b = s1 * s1 * s2 * s2;
        return std::array<double, 2>{2 * pi * s1 * c1 * s2 * s2 * q + 0.5 * b,
                                     2 * pi * s2 * c2 * s1 * s1 * q - 0.25 * b};
    };
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const Grid g = Grid::make(n);
        const MotionSample s = evaluate_motion(motion, t, g);
        StaggeredSamples u(g);
        for (int c = 0; c < 2; ++c)
            for (int j = 0; j < g.ny(c); ++j)
                for (int i = 0; i < g.nx(c); ++i) {
                    const PointGeom& p = s.at(c, i, j);
                    const auto y = motion.inverse_map(t, p.r[0], p.r[1]);
                    const auto gy = phi_grad(y[0], y[1]);
                    const auto Ji = motion.inverse_jacobian(t, p.r[0], p.r[1]);
                    const double gx0 = Ji[0][0] * gy[0] + Ji[1][0] * gy[1];
                    const double gx1 = Ji[0][1] * gy[0] + Ji[1][1] * gy[1];
                    u.v[c][0](i, j) = gx1;
                    u.v[c][1](i, j) = -gx0;
                }
        const VectorField v = piola_forward_field(u, s);
        err.push_back(check_divergence_free(v, 1.0).max_abs);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.8);
    CHECK(std::log2(err[1] / err[2]) > 1.8);
}
