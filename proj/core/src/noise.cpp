#include "mvns/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "mvns/metric_inner.hpp"

namespace mvns {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(M0) * c[0];
        const std::uint64_t p1 = std::uint64_t(M1) * c[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

double standard_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t mode) {
    const auto r = philox4x32({std::uint32_t(step), std::uint32_t(step >> 32), mode, 0u},
                              {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    // Two 53-bit uniforms in (0,1), then Box-Muller.
    const std::uint64_t a = (std::uint64_t(r[0]) << 21) ^ (r[1] >> 11);
    const std::uint64_t b = (std::uint64_t(r[2]) << 21) ^ (r[3] >> 11);
    const double u1 = (double(a & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
    const double u2 = (double(b & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
    const double pi = std::acos(-1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

std::vector<double> sample_increments(std::uint64_t seed, std::uint64_t step, double dt, int K) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt must be positive");
    if (K < 0) throw std::invalid_argument("sample_increments: K < 0");
    std::vector<double> out(static_cast<std::size_t>(K));
    const double s = std::sqrt(dt);
    for (int k = 0; k < K; ++k) out[std::size_t(k)] = s * standard_normal(seed, step, std::uint32_t(k));
    return out;
}

std::string to_string(Coupling c) { return c == Coupling::Additive ? "additive" : "multiplicative"; }

NoiseModel NoiseModel::make(const Grid& g, int K, Coupling coupling, double amplitude) {
    if (K < 0) throw std::invalid_argument("noise: K must be >= 0");
    static const std::array<int, 2> table[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {2, 3}, {3, 2},
                                               {3, 3}, {1, 4}, {4, 1}, {2, 4}, {4, 2}, {3, 4}, {4, 3}, {4, 4}};
    if (K > int(std::size(table))) throw std::invalid_argument("noise: K exceeds the built-in mode table (16)");
    const double pi = std::acos(-1.0);
    NoiseModel nm;
    nm.K = K;
    nm.coupling = coupling;
    for (int k = 0; k < K; ++k) {
        const int a = table[k][0], b = table[k][1];
        VectorField e = discrete_curl(g, [&](double x, double y) {
            return std::sin(pi * x) * std::sin(a * pi * x) * std::sin(pi * y) * std::sin(b * pi * y);
        });
        e *= 1.0 / norm_L2(e);
        nm.modes.push_back(std::move(e));
        nm.wavenumbers.push_back({a, b});
        nm.weight.push_back(amplitude * 2.0 / double(a * a + b * b));
    }
    return nm;
}

std::vector<VectorField> NoiseModel::sigma(const VectorField& v, const MetricData& m) const {
    std::vector<VectorField> out;
    out.reserve(std::size_t(K));
    for (int k = 0; k < K; ++k) {
        VectorField s = modes[std::size_t(k)];
        double c = weight[std::size_t(k)];
        if (coupling == Coupling::Multiplicative) c *= inner_0t(v, s, m) / inner_0t(s, s, m);
        s *= c;
        out.push_back(std::move(s));
    }
    return out;
}

double NoiseModel::f_bound(const MetricData& m) const {
    const double pi = std::acos(-1.0);
    double f = 0.0;
    for (int k = 0; k < K; ++k) {
        const VectorField& e = modes[std::size_t(k)];
        const double w2 = weight[std::size_t(k)] * weight[std::size_t(k)];
        const double e1 = inner_1t(e, e, m);
        if (coupling == Coupling::Additive)
            f += w2 * e1;
        else
            f += 2.0 * w2 * e1 / (pi * pi * inner_0t(e, e, m));
    }
    return f;
}

VectorField apply_noise(const VectorField& v, const NoiseModel& noise, const std::vector<double>& dW,
                        const MetricData& m, double proj_tol) {
    if (int(dW.size()) != noise.K) throw std::invalid_argument("apply_noise: increment count != K");
    VectorField out(v.grid);
    bool any = false;
    for (int k = 0; k < noise.K; ++k) {
        const double w = dW[std::size_t(k)];
        if (w == 0.0) continue;
        double c = noise.weight[std::size_t(k)] * w;
        const VectorField& e = noise.modes[std::size_t(k)];
        if (noise.coupling == Coupling::Multiplicative) c *= inner_0t(v, e, m) / inner_0t(e, e, m);
        out.axpy(c, e);
        any = true;
    }
    if (!any) return out;
    return leray_project(out, proj_tol);
}

}  // namespace mvns
