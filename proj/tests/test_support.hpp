#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"

namespace mvns::testing {

inline double bump3(double x, double y) {
    const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
    return b * b * b;
}

/// Wall-vanishing solenoidal vortex with unit-scale H1 norm times A.
inline VectorField vortex(const Grid& g, double A = 1.0) {
    return discrete_curl(g, [A](double x, double y) { return A * bump3(x, y) * (1.0 + 0.5 * x - 0.25 * y) / 64.0; });
}

/// Non-solenoidal smooth field with zero wall slots.
inline VectorField rough_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
    return VectorField::from_function(g, [=](int comp, double x, double y) {
        return comp == 0 ? std::sin(3.0 * x + a) * std::cos(2.0 * y + b) : std::cos(x * c + 2.0 * y) + d * x * y;
    });
}

/// Smooth field supported in [0.2, 0.8]^2 with random polynomial modulation.
inline VectorField interior_field(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::array<double, 8> a;
    for (double& x : a) x = U(rng);
    return VectorField::from_function(g, [a](int c, double x, double y) {
        auto bump = [](double s) {
            if (s <= 0.2 || s >= 0.8) return 0.0;
            const double q = (s - 0.2) * (0.8 - s) / 0.09;
            return q * q * q * q;
        };
        const double b = bump(x) * bump(y);
        return b * (c == 0 ? a[0] + a[1] * x + a[2] * y + a[3] * x * y : a[4] + a[5] * x + a[6] * y + a[7] * x * y);
    });
}

inline std::vector<DomainMotion> builtin_motions(double t_max) {
    return {DomainMotion::identity(t_max), DomainMotion::rotation(1.0, t_max), DomainMotion::shear(0.3, 2.0, t_max),
            DomainMotion::wavy(0.1, 2.0, t_max),
            DomainMotion::table({{0.1, 2.0, 0}, {0.05, 3.0, 2}}, t_max)};
}

inline double rel_diff(const VectorField& a, const VectorField& b) {
    const double nb = norm_L2(b);
    return norm_L2(a - b) / (nb > 0.0 ? nb : 1.0);
}

inline bool bitwise_equal(const VectorField& a, const VectorField& b) {
    return a.grid == b.grid && a.c[0].a == b.c[0].a && a.c[1].a == b.c[1].a;
}

}  // namespace mvns::testing
