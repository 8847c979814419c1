#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"
#include "mvns/state.hpp"

namespace mvns {

/// Theta(x) = log(1 + log(1 + x)).
double theta(double x);
double theta_prime(double x);

/// Named scalar results plus identifying metadata; serializes to key = value text.
struct AuditReport {
    std::map<std::string, double> values;
    std::map<std::string, std::string> meta;

    void set(const std::string& k, double v) { values[k] = v; }
    double get(const std::string& k) const;
    bool all_finite() const;
    std::string to_text() const;
};

struct EnsembleEntry {
    double N = 0.0;
    const Trajectory* trajectory = nullptr;
};

/// Monte Carlo E sup Theta per cutoff level and the fitted C making
/// E sup Theta <= Theta(||u0||_{H1}^2) + C (1 + ||u0||_{L2}^2) hold across the sweep.
AuditReport moment_audit(const std::vector<EnsembleEntry>& ensemble, double u0_h1_sq, double u0_l2_sq);

/// Discrete iota_t^* = A0^{-1} P L^#_t on probes (reference time 0).
AuditReport iota_audit(const DomainMotion& motion, double t, const Grid& grid, const std::vector<VectorField>& probes,
                       double tol = 1e-10);

/// A0^{-1} P f for the discrete Stokes operator A0 = P Delta on solenoidal fields.
VectorField stokes_solve(const VectorField& f, double tol = 1e-11);

/// h2 = ||u||_{H^2}, n2 = sqrt(l2^2 + n4^2), n3 = sqrt(l2^2 + n5^2), n4 = ||Delta u||, n5 = ||P Delta u||.
struct NormSet {
    double h2 = 0.0, n2 = 0.0, n3 = 0.0, n4 = 0.0, n5 = 0.0, l2 = 0.0;
};
NormSet equivalence_norms(const VectorField& v);

/// Pairwise ratio extrema among the five norms, the Stokes constant C0 and the Poincare constant c0.
AuditReport norm_equivalence_audit(const Grid& grid, const std::vector<VectorField>& samples);

/// Random smooth wall-vanishing solenoidal fields (discrete curls of polynomial bumps).
std::vector<VectorField> random_solenoidal_samples(const Grid& grid, int count, std::uint64_t seed);

struct EnergyRow {
    double t = 0.0;
    double l2_moving = 0.0;
    double norm_1t = 0.0;
    double theta = 0.0;
    double dissipation_increment = 0.0;
};
std::vector<EnergyRow> energy_series(const Trajectory& traj);

/// Operator-norm proxy of Phi(t): centered difference of ||v||_{1,t}^2 over the probes.
double phi_proxy(const DomainMotion& motion, double t, const Grid& grid, const std::vector<VectorField>& probes,
                 double eps = 1e-5);

/// Inner-product equivalence constant c1 over sample fields at a list of times.
double c1_constant(const DomainMotion& motion, const std::vector<double>& times, const Grid& grid,
                   const std::vector<VectorField>& samples);

}  // namespace mvns
