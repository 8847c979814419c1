#include "mvns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mvns/krylov.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/operators.hpp"
#include "mvns/spectral.hpp"

namespace mvns {

double theta(double x) {
    if (!(x >= 0.0)) throw std::domain_error("theta: negative or NaN argument");
    return std::log1p(std::log1p(x));
}

double theta_prime(double x) {
    if (!(x >= 0.0)) throw std::domain_error("theta_prime: negative or NaN argument");
    return 1.0 / ((1.0 + x) * (1.0 + std::log1p(x)));
}

double AuditReport::get(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) throw std::out_of_range("audit key not found: " + k);
    return it->second;
}

bool AuditReport::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](const auto& kv) { return std::isfinite(kv.second); });
}

std::string AuditReport::to_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : meta) os << k << " = " << v << "\n";
    char buf[64];
    for (const auto& [k, v] : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << k << " = " << buf << "\n";
    }
    return os.str();
}

namespace {

std::string level_key(double N) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", N);
    return buf;
}

}  // namespace

AuditReport moment_audit(const std::vector<EnsembleEntry>& ensemble, double u0_h1_sq, double u0_l2_sq) {
    if (ensemble.size() < 2) throw std::invalid_argument("moment_audit: need at least two trajectories");
    std::map<double, std::vector<double>> by_level;
    for (const auto& e : ensemble) {
        if (!e.trajectory) throw std::invalid_argument("moment_audit: null trajectory");
        by_level[e.N].push_back(e.trajectory->theta_sup);
    }
    AuditReport r;
    r.meta["audit"] = "moment";
    const double base = theta(u0_h1_sq);
    double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
    double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
    for (const auto& [N, vals] : by_level) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= double(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double se = vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1) / double(vals.size())) : 0.0;
        const double C = std::max(0.0, (mean - base) / (1.0 + u0_l2_sq));
        const std::string k = level_key(N);
        r.set("E_sup_theta.N=" + k, mean);
        r.set("std_error.N=" + k, se);
        r.set("C.N=" + k, C);
        r.set("members.N=" + k, double(vals.size()));
        cmax = std::max(cmax, C);
        cmin = std::min(cmin, C);
        emin = std::min(emin, mean);
        emax = std::max(emax, mean);
    }
    r.set("theta_u0", base);
    r.set("C_fit", cmax);
    r.set("levels", double(by_level.size()));
    r.set("relative_spread", emax > 0.0 ? (emax - emin) / emax : 0.0);
    r.set("C_relative_spread", cmax > 0.0 ? (cmax - cmin) / cmax : 0.0);
    return r;
}

VectorField stokes_solve(const VectorField& f, double tol) {
    const VectorField b = -1.0 * leray_project(f, 1e-13);
    if (norm_L2(b) == 0.0) return VectorField(f.grid);
    const LinOp A = [](const VectorField& x) { return -1.0 * leray_project(laplacian(x), 1e-13); };
    const LinOp K = [](const VectorField& r) { return leray_project(spectral::helmholtz_solve(r, 0.0, 1.0), 1e-13); };
    return cg(A, K, b, VectorField(f.grid), tol, 500);
}

AuditReport iota_audit(const DomainMotion& motion, double t, const Grid& grid, const std::vector<VectorField>& probes,
                       double tol) {
    if (probes.empty()) throw std::invalid_argument("iota_audit: empty probe set");
    const OperatorBundle b = OperatorBundle::build(motion, t, 0.0, grid);
    auto iota = [&](const VectorField& v) { return stokes_solve(apply_Lh_sharp(v, b), tol); };

    double c2 = 0.0, c3 = 0.0, dev = 0.0;
    int max_iter_used = 0;
    bool converged = true;
    for (const auto& v : probes) {
        const double nv = norm_H2(v);
        if (!(nv > 0.0)) throw std::invalid_argument("iota_audit: zero probe");
        const VectorField iv = iota(v);
        c2 = std::max(c2, norm_H2(iv) / nv);
        dev = std::max(dev, norm_H2(iv - v) / nv);

        // Neumann iteration x <- v + (I - iota) x for iota x = v.
        VectorField x = v;
        bool ok = false;
        int it = 0;
        for (; it < 200; ++it) {
            VectorField next = v + x - iota(x);
            const double change = norm_H2(next - x);
            x = std::move(next);
            if (!x.finite()) break;
            if (change <= 10.0 * tol * norm_H2(x)) {
                ok = true;
                ++it;
                break;
            }
        }
        max_iter_used = std::max(max_iter_used, it);
        converged = converged && ok;
        if (ok) c3 = std::max(c3, norm_H2(x) / nv);
    }
    AuditReport r;
    r.meta["audit"] = "iota";
    r.meta["motion"] = motion.describe();
    r.meta["n"] = std::to_string(grid.n);
    r.set("t", t);
    r.set("c2", c2);
    r.set("c3", converged ? c3 : std::numeric_limits<double>::infinity());
    r.set("deviation", dev);
    r.set("half_margin_violated", dev > 0.5 ? 1.0 : 0.0);
    r.set("neumann_converged", converged ? 1.0 : 0.0);
    r.set("neumann_iterations", double(max_iter_used));
    r.set("probes", double(probes.size()));
    return r;
}

NormSet equivalence_norms(const VectorField& v) {
    NormSet s;
    s.l2 = norm_L2(v);
    s.h2 = norm_H2(v);
    s.n4 = norm_lap(v);
    s.n5 = norm_A(v);
    s.n2 = std::sqrt(s.l2 * s.l2 + s.n4 * s.n4);
    s.n3 = std::sqrt(s.l2 * s.l2 + s.n5 * s.n5);
    return s;
}

AuditReport norm_equivalence_audit(const Grid& grid, const std::vector<VectorField>& samples) {
    if (samples.empty()) throw std::invalid_argument("norm_equivalence_audit: no samples");
    static const char* names[5] = {"h2", "n2", "n3", "n4", "n5"};
    double lo[5][5], hi[5][5];
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            lo[a][b] = std::numeric_limits<double>::infinity();
            hi[a][b] = 0.0;
        }
    double C0 = 0.0, c0 = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (const auto& v : samples) {
        require_same_grid(grid, v.grid);
        const NormSet s = equivalence_norms(v);
        const double val[5] = {s.h2, s.n2, s.n3, s.n4, s.n5};
        for (double x : val)
            if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("norm_equivalence_audit: degenerate sample");
        if (s.n3 > s.n2 || s.n2 > s.h2) ++violations;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b) {
                const double q = val[a] / val[b];
                lo[a][b] = std::min(lo[a][b], q);
                hi[a][b] = std::max(hi[a][b], q);
            }
        C0 = std::max(C0, s.h2 / s.n5);
        c0 = std::min(c0, s.n4 / s.l2);
    }
    AuditReport r;
    r.meta["audit"] = "norms";
    r.meta["n"] = std::to_string(grid.n);
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
            const std::string k = std::string("ratio.") + names[a] + "/" + names[b];
            r.set(k + ".min", lo[a][b]);
            r.set(k + ".max", hi[a][b]);
        }
    r.set("C0", C0);
    r.set("c0", c0);
    r.set("ordering_violations", double(violations));
    r.set("samples", double(samples.size()));
    return r;
}

std::vector<VectorField> random_solenoidal_samples(const Grid& grid, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("random_solenoidal_samples: count < 1");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    std::vector<VectorField> out;
    out.reserve(std::size_t(count));
    for (int s = 0; s < count; ++s) {
        std::array<double, 10> a;
        for (double& c : a) c = uniform();
        out.push_back(discrete_curl(grid, [&a](double x, double y) {
            const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
            const double X = x - 0.5, Y = y - 0.5;
            const double p = a[0] + a[1] * X + a[2] * Y + a[3] * X * X + a[4] * X * Y + a[5] * Y * Y +
                             a[6] * X * X * X + a[7] * X * X * Y + a[8] * X * Y * Y + a[9] * Y * Y * Y;
            return b * b * b * p;
        }));
    }
    return out;
}

std::vector<EnergyRow> energy_series(const Trajectory& traj) {
    std::vector<EnergyRow> out;
    double prev = 0.0;
    for (const auto& row : traj.rows) {
        if (row.kind != "sample") continue;
        EnergyRow e;
        e.t = row.t;
        e.l2_moving = row.norm_0t;
        e.norm_1t = row.norm_1t;
        e.theta = row.theta;
        e.dissipation_increment = row.dissipation - prev;
        prev = row.dissipation;
        out.push_back(e);
    }
    return out;
}

double phi_proxy(const DomainMotion& motion, double t, const Grid& grid, const std::vector<VectorField>& probes,
                 double eps) {
    if (probes.empty()) throw std::invalid_argument("phi_proxy: empty probe set");
    const DomainMotion m = motion.with_horizon(std::max(motion.t_max(), t + eps));
    const double ta = std::max(0.0, t - eps), tb = t + eps;
    const MetricData ma = metric_tensors(evaluate_motion(m, ta, grid));
    const MetricData mb = metric_tensors(evaluate_motion(m, tb, grid));
    const MetricData mt = metric_tensors(evaluate_motion(m, t, grid));
    double worst = 0.0;
    for (const auto& v : probes) {
        const double n = norm_1t(v, mt);
        if (!(n > 0.0)) throw std::invalid_argument("phi_proxy: zero probe");
        const double a = norm_1t(v, ma), b = norm_1t(v, mb);
        worst = std::max(worst, std::abs(b * b - a * a) / ((tb - ta) * n * n));
    }
    return worst;
}

double c1_constant(const DomainMotion& motion, const std::vector<double>& times, const Grid& grid,
                   const std::vector<VectorField>& samples) {
    const MetricData m0 = metric_tensors(evaluate_motion(motion, 0.0, grid));
    double c1 = 1.0;
    for (double t : times) {
        const MetricData mt = metric_tensors(evaluate_motion(motion, t, grid));
        for (const auto& v : samples) {
            const double a = norm_1t(v, m0), b = norm_1t(v, mt);
            if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("c1_constant: zero sample");
            c1 = std::max({c1, a / b, b / a});
        }
    }
    return c1;
}

}  // namespace mvns
