#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"

namespace mvns {

/// Everything needed to apply the transformed operators at time t with reference time t0.
struct OperatorBundle {
    DomainMotion motion;
    Grid grid;
    double t = 0.0;
    double t0 = 0.0;
    MotionSample sample;
    MetricData metric;
    /// coeffs[l][point][6*k + alpha]: tabulated non-divergence coefficients on component grid l.
    std::array<std::vector<std::array<double, 12>>, 2> coeffs;

    static OperatorBundle build(const DomainMotion& motion, double t, double t0, const Grid& grid);
};

/// Global cutoff level; N = +inf disables the cutoff.
struct CutoffLevel {
    double N = std::numeric_limits<double>::infinity();
};

VectorField apply_Lh_sharp(const VectorField& v, const OperatorBundle& b);
VectorField apply_M(const VectorField& v, const OperatorBundle& b);
VectorField nonlinear_N(const VectorField& v, const OperatorBundle& b);

VectorField apply_P0h(const VectorField& v, const OperatorBundle& b, double proj_tol = 1e-12);
/// Solves P0h x = w for solenoidal w by CG on the solenoidal subspace.
VectorField solve_P0h(const VectorField& w, const OperatorBundle& b, double tol = 1e-8, SolveStats* stats = nullptr);

/// g_N(r) = min(1, N / r), g_N(0) = 1.
double cutoff_gN(double r, const CutoffLevel& N);

struct DriftTerms {
    VectorField linear;      ///< (P0h)^{-1} P0 L^# v
    VectorField advection;   ///< -g_N (P0h)^{-1} P0h N(v,v)
    VectorField motion;      ///< -(P0h)^{-1} P0h M v
    double g = 1.0;
};

DriftTerms drift_terms(const VectorField& v, const OperatorBundle& b, std::optional<CutoffLevel> N,
                       double tol = 1e-10);
VectorField drift(const VectorField& v, const OperatorBundle& b, std::optional<CutoffLevel> N, double tol = 1e-10);

/// max over probes of ||(L^#_{t} - L^#_{t0}) v|| / ||v||_{H^2}.
double stokes_deviation(const OperatorBundle& b, const std::vector<VectorField>& probes);

/// Smooth wall-vanishing solenoidal probe fields used by the deviation monitor.
std::vector<VectorField> default_probes(const Grid& g);

}  // namespace mvns
