#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"

namespace mvns {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Standard normal deviate addressed by (seed, step, mode).
double standard_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t mode);

/// K independent N(0, dt) increments for one step.
std::vector<double> sample_increments(std::uint64_t seed, std::uint64_t step, double dt, int K);

enum class Coupling { Additive, Multiplicative };

std::string to_string(Coupling c);

/// Truncated noise: K smooth solenoidal reference-grid modes e_k with per-mode weights.
/// Additive: sigma_k(v) = w_k e_k. Multiplicative: sigma_k(v) = w_k c_k(v) e_k with
/// c_k(v) = (v, e_k)_{0,t} / (e_k, e_k)_{0,t}.
struct NoiseModel {
    int K = 0;
    Coupling coupling = Coupling::Additive;
    std::vector<double> weight;
    std::vector<VectorField> modes;
    std::vector<std::array<int, 2>> wavenumbers;

    /// Modes sin(pi x) sin(a pi x) sin(pi y) sin(b pi y) stream functions, L2-normalized;
    /// weight_k = amplitude * 2 / (a^2 + b^2).
    static NoiseModel make(const Grid& g, int K, Coupling coupling, double amplitude);

    /// sigma_k(v) for every k.
    std::vector<VectorField> sigma(const VectorField& v, const MetricData& m) const;
    /// Declared f(t) with sum_k ||sigma_k(v)||_{1,t}^2 <= f (1 + ||v||_{1,t}^2).
    double f_bound(const MetricData& m) const;
};

/// sum_k sigma_k(v) dW_k, projected solenoidal.
VectorField apply_noise(const VectorField& v, const NoiseModel& noise, const std::vector<double>& increments,
                        const MetricData& m, double proj_tol = 1e-12);

}  // namespace mvns
