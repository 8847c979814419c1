#pragma once

#include <array>
#include <string>
#include <vector>

#include "mvns/fields.hpp"

namespace mvns {

enum class MotionKind { Identity, Rotation, Shear, Wavy, Table };

std::string to_string(MotionKind k);

/// One displacement term c(t) * phi(y2) of a shear-type motion r = (y1 + sum c phi, y2).
/// mode 0 uses phi = y2, mode m >= 1 uses phi = sin(m pi y2); c(t) = amplitude sin(omega t).
struct ShearTerm {
    double amplitude = 0.0;
    double omega = 0.0;
    int mode = 0;
};

/// r(t, y) and all derivatives needed downstream at one point.
struct PointGeom {
    double r[2]{};
    double J[2][2]{};            ///< J[m][a] = dr_m/dy_a
    double Jinv[2][2]{};
    double det = 1.0;
    double d2[2][2][2]{};        ///< d2[m][a][b] = d^2 r_m / dy_a dy_b
    double d3[2][2][2][2]{};     ///< d3[m][a][b][c]
    double rt[2]{};              ///< dr/dt
    double Jt[2][2]{};           ///< d^2 r / dt dy
};

/// Analytic volume-preserving motion of the unit square.
class DomainMotion {
public:
    static DomainMotion identity(double t_max);
    static DomainMotion rotation(double omega, double t_max);
    static DomainMotion shear(double amplitude, double omega, double t_max);
    static DomainMotion wavy(double amplitude, double omega, double t_max);
    static DomainMotion table(std::vector<ShearTerm> terms, double t_max);

    MotionKind kind() const { return kind_; }
    double t_max() const { return t_max_; }
    double t_ref() const { return t_ref_; }
    double omega() const { return omega_; }
    const std::vector<ShearTerm>& terms() const { return terms_; }
    std::string describe() const;

    /// Same motion with a different validation horizon.
    DomainMotion with_horizon(double t_max) const;

    /// The motion r^{t0}(t, z) = r(t, rbar(t0, z)) in closed form.
    DomainMotion rebased(double t0) const;

    PointGeom eval(double t, double y1, double y2) const;
    std::array<double, 2> map(double t, double y1, double y2) const;
    std::array<double, 2> inverse_map(double t, double x1, double x2) const;
    /// d rbar / dx at x.
    std::array<std::array<double, 2>, 2> inverse_jacobian(double t, double x1, double x2) const;

    void check_time(double t) const;

private:
    MotionKind kind_ = MotionKind::Identity;
    double omega_ = 0.0;
    double t_max_ = 0.0;
    double t_ref_ = 0.0;
    std::vector<ShearTerm> terms_;
};

/// Motion data at the staggered sample points of both velocity components.
struct MotionSample {
    Grid grid;
    double t = 0.0;
    double t0 = 0.0;
    std::array<std::vector<PointGeom>, 2> pts;
    const PointGeom& at(int c, int i, int j) const { return pts[c][std::size_t(j) * grid.nx(c) + i]; }
};

struct PointMetric {
    double h[2][2]{};
    double hinv[2][2]{};
    double gamma[2][2][2]{};     ///< gamma[i][j][k] = Gamma^i_{jk}
    double dh_dt[2][2]{};
    double dhinv_dt[2][2]{};
};

struct MetricData {
    Grid grid;
    double t = 0.0;
    std::array<std::vector<PointMetric>, 2> pts;
    const PointMetric& at(int c, int i, int j) const { return pts[c][std::size_t(j) * grid.nx(c) + i]; }
};

/// Samples the motion at the reference grid (reference time 0).
MotionSample evaluate_motion(const DomainMotion& motion, double t, const Grid& grid);

/// Samples the motion seen from reference time t0, expressed on the lattice through r(t0, .).
/// Built by composing rebased(t0) with r(t0, .) via the chain rule.
MotionSample evaluate_composite(const DomainMotion& motion, double t, double t0, const Grid& grid);

/// Chain rule for R = F o G at one point (F evaluated at G(y)).
PointGeom compose(const PointGeom& outer, const PointGeom& inner);

PointMetric point_metric(const PointGeom& p);
MetricData metric_tensors(const MotionSample& sample);
/// Christoffel symbols per component grid, gamma[i][j][k] packed as 8 arrays.
std::array<std::vector<std::array<double, 8>>, 2> christoffel(const MotionSample& sample);

/// Non-divergence coefficients of the transformed elliptic operator at one point.
/// coef[l][k][a] multiplies d^a v_k in output component l; a indexes {1, d1, d2, d11, d12, d22}.
struct PointCoeffs {
    double coef[2][2][6]{};
};
PointCoeffs lh_sharp_coefficients(const PointGeom& p);

/// max over grid points, (k,l), alpha of |P^{t0}(t) - P^{t0}(t0)|.
double coefficient_drift(const DomainMotion& motion, double t0, double t, const Grid& grid);

}  // namespace mvns
