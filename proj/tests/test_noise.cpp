#include <doctest.h>

#include <cmath>

#include "mvns/metric_inner.hpp"
#include "mvns/noise.hpp"
#include "mvns/operators.hpp"
#include "test_support.hpp"

using namespace mvns;
using namespace mvns::testing;

TEST_CASE("philox known answers") {
    using A = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("increments have the right moments") {
    const int M = 20000;
    const double dt = 0.01;
    double s1 = 0.0, s2 = 0.0, s12 = 0.0;
    for (int k = 0; k < M; ++k) {
        const auto w = sample_increments(42, std::uint64_t(k), dt, 2);
        s1 += w[0];
        s2 += w[0] * w[0];
        s12 += w[0] * w[1];
    }
    const double mean = s1 / M, var = s2 / M, cov = s12 / M;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(dt / M));
    CHECK(std::abs(var - dt) < 3.0 * dt * std::sqrt(2.0 / M));
    CHECK(std::abs(cov) < 3.0 * dt / std::sqrt(double(M)));
}

TEST_CASE("increments are addressable and deterministic") {
    CHECK(sample_increments(1, 5, 0.1, 4) == sample_increments(1, 5, 0.1, 4));
    CHECK(sample_increments(1, 5, 0.1, 4) != sample_increments(2, 5, 0.1, 4));
    CHECK(sample_increments(1, 5, 0.1, 4) != sample_increments(1, 6, 0.1, 4));
    const auto a = sample_increments(9, 3, 0.1, 8), b = sample_increments(9, 3, 0.1, 3);
    for (int k = 0; k < 3; ++k) CHECK(a[std::size_t(k)] == b[std::size_t(k)]);
    CHECK_THROWS_AS(sample_increments(1, 1, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(sample_increments(1, 1, 0.1, -1), std::invalid_argument);
}

TEST_CASE("noise modes are solenoidal, normalized and wall-free") {
    const Grid g = Grid::make(16);
    const NoiseModel nm = NoiseModel::make(g, 8, Coupling::Additive, 2.0);
    CHECK(nm.modes.size() == 8);
    for (const auto& e : nm.modes) {
        CHECK(norm_L2(e) == doctest::Approx(1.0));
        CHECK(max_abs(divergence(e)) < 1e-12);
        CHECK(e.walls_zero());
    }
    CHECK(nm.weight[0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(NoiseModel::make(g, 17, Coupling::Additive, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseModel::make(g, -1, Coupling::Additive, 1.0), std::invalid_argument);
}

TEST_CASE("zero increments give zero forcing") {
    const Grid g = Grid::make(16);
    const MetricData m = identity_metric(g);
    for (Coupling c : {Coupling::Additive, Coupling::Multiplicative}) {
        const NoiseModel nm = NoiseModel::make(g, 4, c, 1.0);
        CHECK(norm_L2(apply_noise(vortex(g), nm, std::vector<double>(4, 0.0), m)) == 0.0);
    }
    CHECK_THROWS_AS(apply_noise(vortex(g), NoiseModel::make(g, 4, Coupling::Additive, 1.0), {0.1}, m),
                    std::invalid_argument);
}

TEST_CASE("additive forcing ignores the state and multiplicative forcing scales with it") {
    const Grid g = Grid::make(16);
    const MetricData m = identity_metric(g);
    const auto dW = sample_increments(3, 0, 0.01, 4);
    const NoiseModel add = NoiseModel::make(g, 4, Coupling::Additive, 1.0);
    CHECK(bitwise_equal(apply_noise(vortex(g), add, dW, m), apply_noise(vortex(g, 5.0), add, dW, m)));
    const NoiseModel mul = NoiseModel::make(g, 4, Coupling::Multiplicative, 1.0);
    const VectorField a = apply_noise(vortex(g), mul, dW, m), b = apply_noise(vortex(g, 3.0), mul, dW, m);
    CHECK(rel_diff(b, 3.0 * a) < 1e-12);
    const VectorField e0 = mul.modes[0];
    const auto s = mul.sigma(e0, m);
    CHECK(rel_diff(s[0], mul.weight[0] * e0) < 1e-12);
}

TEST_CASE("declared noise growth bound holds") {
    const Grid g = Grid::make(16);
    for (Coupling c : {Coupling::Additive, Coupling::Multiplicative})
        for (const auto& mo : builtin_motions(1.0)) {
            const NoiseModel nm = NoiseModel::make(g, 6, c, 2.0);
            const MetricData m = metric_tensors(evaluate_motion(mo, 0.5, g));
            const double f = nm.f_bound(m);
            CHECK(f > 0.0);
            for (double A : {0.0, 0.5, 4.0, 30.0}) {
                const VectorField v = vortex(g, A);
                double lhs = 0.0;
                for (const auto& s : nm.sigma(v, m)) lhs += inner_1t(s, s, m);
                const double n1 = norm_1t(v, m);
                CHECK(lhs <= f * (1.0 + n1 * n1) * (1.0 + 1e-12));
            }
        }
}

TEST_CASE("multiplicative coupling is Lipschitz in the moving L2 norm") {
    const Grid g = Grid::make(16);
    const MetricData m = metric_tensors(evaluate_motion(DomainMotion::shear(0.3, 2.0, 1.0), 0.5, g));
    const NoiseModel nm = NoiseModel::make(g, 6, Coupling::Multiplicative, 1.0);
    const VectorField v = vortex(g, 1.0), w = vortex(g, 1.0) + 0.3 * rough_field(g, 4);
    const auto sv = nm.sigma(v, m), sw = nm.sigma(w, m);
    double lhs = 0.0, L = 0.0;
    for (int k = 0; k < nm.K; ++k) {
        const VectorField d = sv[std::size_t(k)] - sw[std::size_t(k)];
        lhs += inner_0t(d, d, m);
        L += nm.weight[std::size_t(k)] * nm.weight[std::size_t(k)];
    }
    const VectorField d = v - w;
    CHECK(lhs <= L * inner_0t(d, d, m) * (1.0 + 1e-12));
}
