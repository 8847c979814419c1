#pragma once

#include <cstdint>
#include <optional>

#include "mvns/fields.hpp"
#include "mvns/noise.hpp"
#include "mvns/state.hpp"

namespace mvns::oracle {

/// Plain (v . grad) v on the staggered grid; wall slots are 0.
VectorField advection(const VectorField& v);

struct OracleOptions {
    double solve_tol = 1e-12;
    double proj_tol = 1e-12;
    int max_iter = 400;
};

/// One semi-implicit projection step on the fixed unit square:
/// (I - dt P Lap) v_new = P(v - dt (v . grad) v + forcing).
VectorField oracle_step(const VectorField& v, double dt, const VectorField* forcing = nullptr,
                        const OracleOptions& opt = {});

struct OracleConfig {
    Grid grid = Grid::make(16);
    double T = 0.1;
    double dt = 1e-3;
    VectorField v0;
    /// Additive noise only; multiplicative coupling uses plain L2 coefficients.
    std::optional<NoiseModel> noise;
    std::uint64_t seed = 0;
    int sample_every = 1;
    OracleOptions opt;
};

/// Fixed-domain trajectory; every sample row carries a snapshot.
Trajectory oracle_trajectory(const OracleConfig& cfg);

}  // namespace mvns::oracle
