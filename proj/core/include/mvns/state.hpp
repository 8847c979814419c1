#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvns/fields.hpp"
#include "mvns/operators.hpp"

namespace mvns {

/// Full integrator state; everything needed for a bit-exact resume.
struct SolverState {
    double t = 0.0;
    double t0 = 0.0;
    VectorField v;
    CutoffLevel N;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
};

/// One trajectory row: a sample or an event (rereference, escalate, ceiling).
struct TrajectoryRow {
    std::string kind;
    std::uint64_t step = 0;
    double t = 0.0;
    double t0 = 0.0;
    double N = 0.0;
    double norm_0t = 0.0;     ///< moving-domain L2 norm
    double norm_1t = 0.0;     ///< moving-domain H1 norm
    double theta = 0.0;       ///< Theta(norm_1t^2)
    double dissipation = 0.0; ///< accumulated int ||v||_{1,s}^2 ds
    double deviation = 0.0;   ///< measured operator deviation (rereference events)
    double old_t0 = 0.0;
};

struct Snapshot {
    double t = 0.0;
    std::uint64_t step = 0;
    VectorField v;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<double> tau_hits;
    std::vector<double> rereference_times;
    std::vector<Snapshot> snapshots;
    double theta_sup = 0.0;
    double dissipation = 0.0;
    bool ceiling_hit = false;
    SolverState state;
};

}  // namespace mvns
