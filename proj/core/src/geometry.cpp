#include "mvns/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mvns {

namespace {

const double kPi = std::acos(-1.0);

void finish_inverse(PointGeom& p) {
    p.det = p.J[0][0] * p.J[1][1] - p.J[0][1] * p.J[1][0];
    if (!(std::abs(p.det) > 1e-14)) throw std::domain_error("singular motion Jacobian");
    const double id = 1.0 / p.det;
    p.Jinv[0][0] = p.J[1][1] * id;
    p.Jinv[0][1] = -p.J[0][1] * id;
    p.Jinv[1][0] = -p.J[1][0] * id;
    p.Jinv[1][1] = p.J[0][0] * id;
}

/// Profile phi(y2) of a shear term and its first three derivatives.
void profile(int mode, double y2, double out[4]) {
    if (mode == 0) {
        out[0] = y2;
        out[1] = 1.0;
        out[2] = 0.0;
        out[3] = 0.0;
        return;
    }
    const double k = mode * kPi;
    const double s = std::sin(k * y2), c = std::cos(k * y2);
    out[0] = s;
    out[1] = k * c;
    out[2] = -k * k * s;
    out[3] = -k * k * k * c;
}

}  // namespace

std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::Identity: return "identity";
        case MotionKind::Rotation: return "rotation";
        case MotionKind::Shear: return "shear";
        case MotionKind::Wavy: return "wavy";
        case MotionKind::Table: return "table";
    }
    return "unknown";
}

DomainMotion DomainMotion::identity(double t_max) {
    DomainMotion m;
    m.kind_ = MotionKind::Identity;
    m.t_max_ = t_max;
    return m;
}

DomainMotion DomainMotion::rotation(double omega, double t_max) {
    DomainMotion m;
    m.kind_ = MotionKind::Rotation;
    m.omega_ = omega;
    m.t_max_ = t_max;
    return m;
}

DomainMotion DomainMotion::shear(double amplitude, double omega, double t_max) {
    DomainMotion m;
    m.kind_ = MotionKind::Shear;
    m.omega_ = omega;
    m.t_max_ = t_max;
    m.terms_ = {ShearTerm{amplitude, omega, 0}};
    return m;
}

DomainMotion DomainMotion::wavy(double amplitude, double omega, double t_max) {
    DomainMotion m;
    m.kind_ = MotionKind::Wavy;
    m.omega_ = omega;
    m.t_max_ = t_max;
    m.terms_ = {ShearTerm{amplitude, omega, 1}};
    return m;
}

DomainMotion DomainMotion::table(std::vector<ShearTerm> terms, double t_max) {
    for (const auto& t : terms)
        if (t.mode < 0) throw std::invalid_argument("table motion: mode must be >= 0");
    DomainMotion m;
    m.kind_ = MotionKind::Table;
    m.t_max_ = t_max;
    m.terms_ = std::move(terms);
    return m;
}

std::string DomainMotion::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    if (kind_ == MotionKind::Rotation) os << "(omega=" << omega_ << ")";
    for (const auto& t : terms_) os << "(a=" << t.amplitude << ",omega=" << t.omega << ",mode=" << t.mode << ")";
    if (t_ref_ != 0.0) os << "@t0=" << t_ref_;
    return os.str();
}

DomainMotion DomainMotion::with_horizon(double t_max) const {
    DomainMotion m = *this;
    m.t_max_ = t_max;
    return m;
}

DomainMotion DomainMotion::rebased(double t0) const {
    check_time(t0);
    DomainMotion m = *this;
    m.t_ref_ = t0;
    return m;
}

void DomainMotion::check_time(double t) const {
    if (!(t >= 0.0) || t > t_max_ * (1.0 + 1e-12) + 1e-14)
        throw std::out_of_range("motion time out of range");
}

PointGeom DomainMotion::eval(double t, double y1, double y2) const {
    check_time(t);
    PointGeom p;
    switch (kind_) {
        case MotionKind::Identity:
            p.r[0] = y1;
            p.r[1] = y2;
            p.J[0][0] = p.J[1][1] = 1.0;
            break;
        case MotionKind::Rotation: {
            const double th = omega_ * (t - t_ref_);
            const double c = std::cos(th), s = std::sin(th);
            p.r[0] = c * y1 - s * y2;
            p.r[1] = s * y1 + c * y2;
            p.J[0][0] = c;
            p.J[0][1] = -s;
            p.J[1][0] = s;
            p.J[1][1] = c;
            p.rt[0] = omega_ * (-s * y1 - c * y2);
            p.rt[1] = omega_ * (c * y1 - s * y2);
            p.Jt[0][0] = -omega_ * s;
            p.Jt[0][1] = -omega_ * c;
            p.Jt[1][0] = omega_ * c;
            p.Jt[1][1] = -omega_ * s;
            break;
        }
        case MotionKind::Shear:
        case MotionKind::Wavy:
        case MotionKind::Table: {
            double f = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0, ft = 0.0, ft1 = 0.0;
            for (const auto& term : terms_) {
                double ph[4];
                profile(term.mode, y2, ph);
                const double c = term.amplitude * (std::sin(term.omega * t) - std::sin(term.omega * t_ref_));
                const double ct = term.amplitude * term.omega * std::cos(term.omega * t);
                f += c * ph[0];
                f1 += c * ph[1];
                f2 += c * ph[2];
                f3 += c * ph[3];
                ft += ct * ph[0];
                ft1 += ct * ph[1];
            }
            p.r[0] = y1 + f;
            p.r[1] = y2;
            p.J[0][0] = 1.0;
            p.J[0][1] = f1;
            p.J[1][1] = 1.0;
            p.d2[0][1][1] = f2;
            p.d3[0][1][1][1] = f3;
            p.rt[0] = ft;
            p.Jt[0][1] = ft1;
            break;
        }
    }
    finish_inverse(p);
    return p;
}

std::array<double, 2> DomainMotion::map(double t, double y1, double y2) const {
    const PointGeom p = eval(t, y1, y2);
    return {p.r[0], p.r[1]};
}

std::array<double, 2> DomainMotion::inverse_map(double t, double x1, double x2) const {
    check_time(t);
    switch (kind_) {
        case MotionKind::Identity: return {x1, x2};
        case MotionKind::Rotation: {
            const double th = omega_ * (t - t_ref_);
            const double c = std::cos(th), s = std::sin(th);
            return {c * x1 + s * x2, -s * x1 + c * x2};
        }
        default: {
            // y2 = x2 for shear-type motions, so the displacement is explicit.
            const PointGeom p = eval(t, 0.0, x2);
            return {x1 - p.r[0], x2};
        }
    }
}

std::array<std::array<double, 2>, 2> DomainMotion::inverse_jacobian(double t, double x1, double x2) const {
    const auto y = inverse_map(t, x1, x2);
    const PointGeom p = eval(t, y[0], y[1]);
    return {{{p.Jinv[0][0], p.Jinv[0][1]}, {p.Jinv[1][0], p.Jinv[1][1]}}};
}

PointGeom compose(const PointGeom& F, const PointGeom& G) {
    PointGeom R;
    for (int m = 0; m < 2; ++m) {
        R.r[m] = F.r[m];
        R.rt[m] = F.rt[m];
        for (int a = 0; a < 2; ++a) {
            double s = 0.0, st = 0.0;
            for (int c = 0; c < 2; ++c) {
                s += F.J[m][c] * G.J[c][a];
                st += F.Jt[m][c] * G.J[c][a];
            }
            R.J[m][a] = s;
            R.Jt[m][a] = st;
        }
    }
    for (int m = 0; m < 2; ++m)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c) {
                    s += F.J[m][c] * G.d2[c][a][b];
                    for (int d = 0; d < 2; ++d) s += F.d2[m][c][d] * G.J[c][a] * G.J[d][b];
                }
                R.d2[m][a][b] = s;
                for (int e = 0; e < 2; ++e) {
                    double q = 0.0;
                    for (int c = 0; c < 2; ++c) {
                        q += F.J[m][c] * G.d3[c][a][b][e];
                        for (int d = 0; d < 2; ++d) {
                            q += F.d2[m][c][d] * (G.d2[c][a][e] * G.J[d][b] + G.J[c][a] * G.d2[d][b][e] +
                                                  G.d2[c][a][b] * G.J[d][e]);
                            for (int f = 0; f < 2; ++f)
                                q += F.d3[m][c][d][f] * G.J[c][a] * G.J[d][b] * G.J[f][e];
                        }
                    }
                    R.d3[m][a][b][e] = q;
                }
            }
    finish_inverse(R);
    return R;
}

MotionSample evaluate_motion(const DomainMotion& motion, double t, const Grid& grid) {
    motion.check_time(t);
    MotionSample s;
    s.grid = grid;
    s.t = t;
    s.t0 = motion.t_ref();
    for (int c = 0; c < 2; ++c) {
        s.pts[c].reserve(std::size_t(grid.nx(c)) * grid.ny(c));
        for (int j = 0; j < grid.ny(c); ++j)
            for (int i = 0; i < grid.nx(c); ++i) s.pts[c].push_back(motion.eval(t, grid.x(c, i), grid.y(c, j)));
    }
    return s;
}

MotionSample evaluate_composite(const DomainMotion& motion, double t, double t0, const Grid& grid) {
    if (t < t0) throw std::invalid_argument("composite motion: t < t0");
    const DomainMotion outer = motion.rebased(t0);
    MotionSample s;
    s.grid = grid;
    s.t = t;
    s.t0 = t0;
    for (int c = 0; c < 2; ++c) {
        s.pts[c].reserve(std::size_t(grid.nx(c)) * grid.ny(c));
        for (int j = 0; j < grid.ny(c); ++j)
            for (int i = 0; i < grid.nx(c); ++i) {
                const PointGeom inner = motion.eval(t0, grid.x(c, i), grid.y(c, j));
                const PointGeom out = outer.eval(t, inner.r[0], inner.r[1]);
                s.pts[c].push_back(compose(out, inner));
            }
    }
    return s;
}

PointMetric point_metric(const PointGeom& p) {
    PointMetric m;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double h = 0.0, hi = 0.0, dh = 0.0;
            for (int c = 0; c < 2; ++c) {
                h += p.J[c][a] * p.J[c][b];
                hi += p.Jinv[a][c] * p.Jinv[b][c];
                dh += p.Jt[c][a] * p.J[c][b] + p.J[c][a] * p.Jt[c][b];
            }
            m.h[a][b] = h;
            m.hinv[a][b] = hi;
            m.dh_dt[a][b] = dh;
        }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double s = 0.0;
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) s += m.hinv[a][c] * m.dh_dt[c][d] * m.hinv[d][b];
            m.dhinv_dt[a][b] = -s;
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l) s += p.Jinv[i][l] * p.d2[l][j][k];
                m.gamma[i][j][k] = s;
            }
    return m;
}

MetricData metric_tensors(const MotionSample& sample) {
    MetricData md;
    md.grid = sample.grid;
    md.t = sample.t;
    for (int c = 0; c < 2; ++c) {
        md.pts[c].reserve(sample.pts[c].size());
        for (const auto& p : sample.pts[c]) md.pts[c].push_back(point_metric(p));
    }
    return md;
}

std::array<std::vector<std::array<double, 8>>, 2> christoffel(const MotionSample& sample) {
    std::array<std::vector<std::array<double, 8>>, 2> out;
    for (int c = 0; c < 2; ++c) {
        out[c].reserve(sample.pts[c].size());
        for (const auto& p : sample.pts[c]) {
            const PointMetric m = point_metric(p);
            std::array<double, 8> g{};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k) g[4 * i + 2 * j + k] = m.gamma[i][j][k];
            out[c].push_back(g);
        }
    }
    return out;
}

PointCoeffs lh_sharp_coefficients(const PointGeom& p) {
    const PointMetric m = point_metric(p);
    // d_n Jinv = -Jinv (d_n J) Jinv, d_n hinv = (d_n Jinv) Jinv^T + Jinv (d_n Jinv)^T.
    double dJinv[2][2][2];  // [a][b][n]
    for (int n = 0; n < 2; ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) s += p.Jinv[a][c] * p.d2[c][d][n] * p.Jinv[d][b];
                dJinv[a][b][n] = -s;
            }
    double div_hinv[2] = {0.0, 0.0};  // sum_n d_n h^{qn}
    for (int q = 0; q < 2; ++q)
        for (int n = 0; n < 2; ++n) {
            double s = 0.0;
            for (int c = 0; c < 2; ++c) s += dJinv[q][c][n] * p.Jinv[n][c] + p.Jinv[q][c] * dJinv[n][c][n];
            div_hinv[q] += s;
        }

    PointCoeffs pc;
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            const double hlk = m.h[l][k];
            double* a = pc.coef[l][k];
            a[3] = hlk * m.hinv[0][0];
            a[4] = 2.0 * hlk * m.hinv[0][1];
            a[5] = hlk * m.hinv[1][1];
            // JdJ[n] = sum_m J_ml d_n J_mk
            double JdJ[2];
            for (int n = 0; n < 2; ++n) {
                double s = 0.0;
                for (int mm = 0; mm < 2; ++mm) s += p.J[mm][l] * p.d2[mm][k][n];
                JdJ[n] = s;
            }
            for (int q = 0; q < 2; ++q) {
                double s = div_hinv[q] * hlk;
                for (int n = 0; n < 2; ++n) s += 2.0 * m.hinv[q][n] * JdJ[n];
                a[1 + q] = s;
            }
            double z = 0.0;
            for (int mm = 0; mm < 2; ++mm) {
                double inner = 0.0;
                for (int j = 0; j < 2; ++j) {
                    inner += div_hinv[j] * p.d2[mm][k][j];
                    for (int n = 0; n < 2; ++n) inner += m.hinv[j][n] * p.d3[mm][k][n][j];
                }
                z += p.J[mm][l] * inner;
            }
            a[0] = z;
        }
    return pc;
}

double coefficient_drift(const DomainMotion& motion, double t0, double t, const Grid& grid) {
    if (t < t0) throw std::invalid_argument("coefficient_drift: t < t0");
    motion.check_time(t);
    if (t == t0) return 0.0;
    const DomainMotion rb = motion.rebased(t0);
    double drift = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < grid.ny(c); ++j)
            for (int i = 0; i < grid.nx(c); ++i) {
                const auto z = motion.map(t0, grid.x(c, i), grid.y(c, j));
                const PointCoeffs a = lh_sharp_coefficients(rb.eval(t, z[0], z[1]));
                const PointCoeffs b = lh_sharp_coefficients(rb.eval(t0, z[0], z[1]));
                for (int l = 0; l < 2; ++l)
                    for (int k = 0; k < 2; ++k)
                        for (int q = 0; q < 6; ++q)
                            drift = std::max(drift, std::abs(a.coef[l][k][q] - b.coef[l][k][q]));
            }
    return drift;
}

}  // namespace mvns
