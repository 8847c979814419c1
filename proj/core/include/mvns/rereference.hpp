#pragma once

#include <vector>

#include "mvns/geometry.hpp"
#include "mvns/operators.hpp"
#include "mvns/state.hpp"

namespace mvns {

struct ReferencePolicy {
    double C0 = 1.0;
    double safety = 0.5;
    double max_interval = 0.25;
    /// Coefficient-drift proxy threshold; <= 0 selects proxy_calibration * safety / (2 C0).
    double drift_threshold = 0.0;
    /// Ratio of raw coefficient drift to measured operator deviation the proxy tolerates.
    double proxy_calibration = 40.0;

    void validate() const;
    double deviation_threshold() const { return safety / (2.0 * C0); }
    double proxy_threshold() const { return drift_threshold > 0.0 ? drift_threshold : proxy_calibration * deviation_threshold(); }
};

struct RereferenceDecision {
    bool trigger = false;
    double deviation = 0.0;
    double drift = 0.0;
    bool by_interval = false;
};

RereferenceDecision evaluate_rereference(const ReferencePolicy& policy, const DomainMotion& motion, double t0, double t,
                                         const Grid& grid, const OperatorBundle& bundle,
                                         const std::vector<VectorField>& probes);

bool should_rereference(const ReferencePolicy& policy, const DomainMotion& motion, double t0, double t,
                        const Grid& grid, const OperatorBundle& bundle);

/// Moves the reference time to t_new = state.t. The lattice velocity is carried through the
/// physical field: v -> piola_forward(piola_inverse(v, old), new).
SolverState rereference(const SolverState& state, const DomainMotion& motion, double t_new);

struct DeltaEstimate {
    double delta = 0.0;
    double resolution = 0.0;
    std::vector<double> t0_samples;
    std::vector<double> first_trigger;  ///< per t0, offset t - t0 of the first trigger
};

/// Scans t0 over time_samples and returns the smallest first-trigger offset.
DeltaEstimate estimate_delta(const ReferencePolicy& policy, const DomainMotion& motion, const Grid& grid,
                             const std::vector<double>& time_samples, int steps_per_interval = 64);

}  // namespace mvns
