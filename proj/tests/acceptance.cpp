// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "mvns/app.hpp"
#include "mvns/diagnostics.hpp"
#include "mvns/io.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/oracle.hpp"
#include "mvns/sde.hpp"

using namespace mvns;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

VectorField smooth_initial(const Grid& g, double A) {
    const double pi = std::acos(-1.0);
    return discrete_curl(g, [A, pi](double x, double y) {
        const double s = std::sin(pi * x) * std::sin(pi * y);
        return A * s * s * (1.0 + 0.5 * x - 0.25 * y) / (pi * pi);
    });
}

VectorField vortex(const Grid& g, double A) {
    return discrete_curl(g, [A](double x, double y) {
        const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
        return A * b * b * b / 64.0;
    });
}

std::vector<DomainMotion> builtin_motions(double t_max) {
    return {DomainMotion::identity(t_max), DomainMotion::rotation(1.0, t_max), DomainMotion::shear(0.3, 2.0, t_max),
            DomainMotion::wavy(0.1, 2.0, t_max), DomainMotion::table({{0.1, 2.0, 0}, {0.05, 3.0, 2}}, t_max)};
}

// ---------------------------------------------------------------------------------------------
// 1. static-domain oracle equivalence

struct StaticPair {
    Trajectory sde, oracle;
};

StaticPair static_pair() {
    const Grid g = Grid::make(32);
    SimulationConfig c;
    c.motion = DomainMotion::identity(0.1);
    c.grid = g;
    c.T = 0.1;
    c.dt = 1e-3;
    c.v0 = smooth_initial(g, 10.0);
    c.snapshot_every = 1;
    oracle::OracleConfig o;
    o.grid = g;
    o.T = c.T;
    o.dt = c.dt;
    o.v0 = c.v0;
    return {simulate(c, 0), oracle::oracle_trajectory(o)};
}

Outcome criterion1() {
    const StaticPair p = static_pair();
    if (p.sde.snapshots.size() != p.oracle.snapshots.size() || p.sde.snapshots.size() != 101)
        return {false, "sample count mismatch"};
    double worst = 0.0;
    for (std::size_t k = 0; k < p.sde.snapshots.size(); ++k) {
        const VectorField& a = p.sde.snapshots[k].v;
        const VectorField& b = p.oracle.snapshots[k].v;
        worst = std::max(worst, norm_L2(a - b) / norm_L2(b));
    }
    return {worst <= 1e-8, fmt("max relative L2 difference %.3e over 101 samples", worst)};
}

// ---------------------------------------------------------------------------------------------
// 2. Piola divergence preservation

double piola_divergence(const DomainMotion& m, int n, double t) {
    const double pi = std::acos(-1.0);
    const Grid g = Grid::make(n);
    const MotionSample s = evaluate_motion(m, t, g);
    StaggeredSamples u(g);
    for (int set = 0; set < 2; ++set)
        for (int j = 0; j < g.ny(set); ++j)
            for (int i = 0; i < g.nx(set); ++i) {
                const PointGeom& p = s.at(set, i, j);
                const auto y = m.inverse_map(t, p.r[0], p.r[1]);
                const auto Ji = m.inverse_jacobian(t, p.r[0], p.r[1]);
                // stream function psi = phi(rbar(t, x)), phi = sin^2 sin^2 times a linear weight
                const double s1 = std::sin(pi * y[0]), s2 = std::sin(pi * y[1]);
                const double c1 = std::cos(pi * y[0]), c2 = std::cos(pi * y[1]);
                const double q = 1.0 + 0.5 * y[0] - 0.25 * y[1], b = s1 * s1 * s2 * s2;
                const double gy0 = 2 * pi * s1 * c1 * s2 * s2 * q + 0.5 * b;
                const double gy1 = 2 * pi * s2 * c2 * s1 * s1 * q - 0.25 * b;
                const double gx0 = Ji[0][0] * gy0 + Ji[1][0] * gy1;
                const double gx1 = Ji[0][1] * gy0 + Ji[1][1] * gy1;
                u.v[set][0](i, j) = gx1;
                u.v[set][1](i, j) = -gx0;
            }
    return check_divergence_free(piola_forward_field(u, s), 1.0).max_abs;
}

Outcome criterion2() {
    std::string detail;
    bool ok = true;
    for (const auto& m : {DomainMotion::shear(0.3, 2.0, 1.0), DomainMotion::rotation(1.0, 1.0)}) {
        const double e16 = piola_divergence(m, 16, 0.4), e32 = piola_divergence(m, 32, 0.4),
                     e64 = piola_divergence(m, 64, 0.4);
        const double o1 = std::log2(e16 / e32), o2 = std::log2(e32 / e64);
        ok = ok && o1 >= 1.8 && o2 >= 1.8;
        detail += m.describe() + fmt(": orders %.2f", o1) + fmt(" %.2f; ", o2);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 3. weak-form identity

Outcome criterion3() {
    std::string detail;
    bool ok = true;
    for (const auto& m :
         {DomainMotion::shear(0.3, 2.0, 1.0), DomainMotion::rotation(1.0, 1.0), DomainMotion::wavy(0.1, 2.0, 1.0)}) {
        std::vector<double> C;
        for (int n : {16, 32, 64}) {
            const Grid g = Grid::make(n);
            const OperatorBundle b = OperatorBundle::build(m, 0.4, 0.0, g);
            std::mt19937_64 rng(7);
            std::uniform_real_distribution<double> U(-1.0, 1.0);
            double worst = 0.0;
            for (int p = 0; p < 20; ++p) {
                std::array<double, 8> a, c;
                for (double& x : a) x = U(rng);
                for (double& x : c) x = U(rng);
                auto field = [&g](const std::array<double, 8>& k) {
                    return VectorField::from_function(g, [k](int comp, double x, double y) {
                        auto bump = [](double s) {
                            if (s <= 0.2 || s >= 0.8) return 0.0;
                            const double q = (s - 0.2) * (0.8 - s) / 0.09;
                            return q * q * q * q;
                        };
                        const double w = bump(x) * bump(y);
                        return w * (comp == 0 ? k[0] + k[1] * x + k[2] * y + k[3] * x * y
                                              : k[4] + k[5] * x + k[6] * y + k[7] * x * y);
                    });
                };
                const VectorField v = field(a), w = field(c);
                const double res = std::abs(inner_L2(apply_Lh_sharp(v, b), w) + inner_1t(v, w, b.metric));
                worst = std::max(worst, res / (norm_H2(v) * norm_H2(w)));
            }
            C.push_back(worst * n * n);
        }
        const double r1 = C[1] / C[0], r2 = C[2] / C[1];
        ok = ok && std::abs(r1 - 1.0) <= 0.3 && std::abs(r2 - 1.0) <= 0.3;
        detail += m.describe() + fmt(": C %.3f", C[0]) + fmt(" %.3f", C[1]) + fmt(" %.3f; ", C[2]);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 4. cutoff properties

Outcome criterion4() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    long bound_fail = 0, lip_fail = 0;
    double worst_ulps = 0.0;
    for (double N : {1.0, 5.0, 100.0}) {
        const CutoffLevel L{N};
        for (int k = 0; k < 10000; ++k) {
            // norms spread over several decades around N
            const double r = N * std::pow(10.0, 4.0 * U(rng) - 2.0), s = N * std::pow(10.0, 4.0 * U(rng) - 2.0);
            const double gr = cutoff_gN(r, L), gs = cutoff_gN(s, L);
            if (!(r * gr >= 0.0 && r * gr <= N)) ++bound_fail;
            const double lhs = std::abs(gr - gs), rhs = gr * gs * std::abs(r - s) / N;
            if (lhs > rhs) {
                const double ulp = std::nextafter(std::max(gr, gs), 2.0) - std::max(gr, gs);
                worst_ulps = std::max(worst_ulps, (lhs - rhs) / ulp);
                if (lhs - rhs > 4.0 * ulp) ++lip_fail;
            }
        }
    }
    return {bound_fail == 0 && lip_fail == 0,
            fmt("bound violations %.0f", double(bound_fail)) + fmt(", difference-bound violations %.0f", double(lip_fail)) +
                fmt(" (largest rounding excess %.1f ulp)", worst_ulps)};
}

// ---------------------------------------------------------------------------------------------
// 5. escalation consistency

Outcome criterion5() {
    SimulationConfig c;
    c.grid = Grid::make(16);
    c.motion = DomainMotion::shear(0.1, 1.0, 1.0);
    c.T = 0.1;
    c.dt = 1e-3;
    c.v0 = vortex(c.grid, 1.0);
    c.noise = NoiseModel::make(c.grid, 4, Coupling::Multiplicative, 20.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        // Uncut path, to place N between the initial norm and a later excursion.
        const Trajectory free = simulate(c, seed);
        const double n_init = free.rows.front().norm_1t;
        double peak = 0.0;
        for (const auto& r : free.rows) peak = std::max(peak, r.norm_1t);
        if (peak < 1.02 * n_init) continue;
        SimulationConfig lo = c;
        lo.N0 = 0.5 * (n_init + peak);
        const Trajectory esc = simulate(lo, seed);
        if (esc.tau_hits.empty() || !(esc.tau_hits.front() > 0.0)) continue;
        SimulationConfig hi = c;
        hi.N0 = esc.state.N.N;
        const Trajectory ref = simulate(hi, seed);
        SimulationConfig frozen = lo;
        frozen.escalate = false;
        const Trajectory capped = simulate(frozen, seed);

        const double tau = esc.tau_hits.front();
        double worst = 0.0;
        std::size_t compared = 0;
        for (std::size_t k = 0; k < esc.rows.size(); ++k) {
            if (esc.rows[k].kind != "sample" || esc.rows[k].t < tau) continue;
            for (const auto& r : ref.rows)
                if (r.kind == "sample" && r.step == esc.rows[k].step) {
                    worst = std::max(worst, std::abs(r.norm_1t - esc.rows[k].norm_1t) / r.norm_1t);
                    ++compared;
                }
        }
        const double terminal = norm_L2(esc.state.v - ref.state.v) / norm_L2(ref.state.v);
        const double capped_gap = norm_L2(capped.state.v - ref.state.v) / norm_L2(ref.state.v);
        const bool ok = compared > 0 && worst <= 1e-8 && terminal <= 1e-8;
        return {ok, fmt("seed %.0f", double(seed)) + fmt(", tau = %.3f", tau) + fmt(", N %.3f", lo.N0) +
                        fmt(" -> %.3f", esc.state.N.N) + fmt(", terminal difference %.3e", terminal) +
                        fmt(", path difference %.3e", worst) + fmt(" (non-escalated run differs by %.3e)", capped_gap)};
    }
    return {false, "no seed produced a stopping time after t = 0"};
}

// ---------------------------------------------------------------------------------------------
// 6. Theta moment uniformity

Outcome criterion6() {
    SimulationConfig c;
    c.grid = Grid::make(16);
    c.motion = DomainMotion::shear(0.2, 2.0, 1.0);
    c.T = 0.1;
    c.dt = 1e-3;
    c.v0 = vortex(c.grid, 10.0);
    c.noise = NoiseModel::make(c.grid, 8, Coupling::Additive, 2.0);
    c.escalate = false;
    c.sample_every = 100;
    const OperatorBundle b0 = OperatorBundle::build(c.motion, 0.0, 0.0, c.grid);
    const VectorField u0 = leray_project(c.v0, 1e-12);
    const double h1 = norm_1t(u0, b0.metric), l2 = norm_0t(u0, b0.metric);
    const std::vector<double> levels = {1.0, 2.0, 4.0, 8.0};
    const int members = 32;
    std::vector<Trajectory> tr(levels.size() * members);
    app::parallel_for(int(tr.size()), int(std::max(1u, std::thread::hardware_concurrency())), [&](int k) {
        SimulationConfig ck = c;
        ck.N0 = levels[std::size_t(k / members)];
        tr[std::size_t(k)] = simulate(ck, std::uint64_t(100 + k % members));
    });
    std::vector<EnsembleEntry> ens;
    for (std::size_t k = 0; k < tr.size(); ++k) ens.push_back({levels[k / members], &tr[k]});
    const AuditReport r = moment_audit(ens, h1 * h1, l2 * l2);
    const double C = r.get("C_fit");
    bool holds = true;
    for (double N : levels) {
        char key[64];
        std::snprintf(key, sizeof key, "E_sup_theta.N=%g", N);
        holds = holds && r.get(key) <= theta(h1 * h1) + C * (1.0 + l2 * l2);
    }
    const double spread = r.get("C_relative_spread");
    return {holds && spread <= 0.25 && std::isfinite(C),
            fmt("C = %.4f", C) + fmt(", per-level C spread %.2e", spread) +
                fmt(", E sup Theta spread %.2e", r.get("relative_spread"))};
}

// ---------------------------------------------------------------------------------------------
// 7. re-reference gluing

Outcome criterion7() {
    SimulationConfig d;
    d.grid = Grid::make(16);
    d.motion = DomainMotion::shear(0.2, 2.0, 1.0);
    d.T = 0.2;
    d.dt = 1e-3;
    d.v0 = vortex(d.grid, 1.0);
    d.noise = NoiseModel::make(d.grid, 8, Coupling::Multiplicative, 0.5);
    const Trajectory single = simulate(d, 11);
    d.rereference = RereferenceMode::Forced;
    d.forced_times = {d.T / 2};
    const Trajectory glued = simulate(d, 11);
    // Both lattices carry the pullback through the full motion, so they are directly comparable.
    const double diff = norm_L2(single.state.v - glued.state.v);
    const bool moved = glued.rereference_times.size() == 1 && glued.state.t0 == d.T / 2;
    return {moved && diff <= 1e-6, fmt("terminal L2 difference %.3e", diff) +
                                       fmt(", re-references %.0f", double(glued.rereference_times.size()))};
}

// ---------------------------------------------------------------------------------------------
// 8. delta positivity

Outcome criterion8() {
    ReferencePolicy pol;
    std::vector<double> ts;
    for (int k = 0; k < 20; ++k) ts.push_back(0.5 * k / 19.0);
    bool ok = true;
    std::string detail;
    for (const auto& m : builtin_motions(0.5)) {
        const DeltaEstimate e = estimate_delta(pol, m, Grid::make(16), ts, 32);
        ok = ok && e.delta > 0.0;
        if (m.kind() == MotionKind::Identity) ok = ok && e.delta == pol.max_interval;
        detail += to_string(m.kind()) + fmt(" %.4f; ", e.delta);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 9. norm ordering

Outcome criterion9() {
    const AuditReport coarse = norm_equivalence_audit(Grid::make(16), random_solenoidal_samples(Grid::make(16), 40, 3));
    const AuditReport fine = norm_equivalence_audit(Grid::make(32), random_solenoidal_samples(Grid::make(32), 40, 3));
    // exact ordering, no tolerance
    long violations = 0;
    for (int n : {16, 32})
        for (const auto& v : random_solenoidal_samples(Grid::make(n), 40, 3)) {
            const NormSet s = equivalence_norms(v);
            if (!(s.n3 <= s.n2 && s.n2 <= s.h2)) ++violations;
        }
    double worst = 0.0;
    std::string worst_key;
    for (const auto& [k, v] : coarse.values) {
        if (k == "ordering_violations" || k == "samples") continue;
        const double change = std::abs(fine.get(k) - v) / std::abs(v);
        if (change > worst) {
            worst = change;
            worst_key = k;
        }
    }
    return {violations == 0 && worst <= 0.2, fmt("ordering violations %.0f", double(violations)) +
                                                  fmt(", largest constant change %.3f", worst) + " (" + worst_key +
                                                  ")" + fmt(", C0 = %.4f", coarse.get("C0"))};
}

// ---------------------------------------------------------------------------------------------
// 10. determinism

std::string snapshot_bytes(const Trajectory& tr, const fs::path& dir) {
    std::string all;
    for (const auto& s : tr.snapshots) {
        const fs::path p = dir / ("snap_" + std::to_string(s.step) + ".bin");
        write_snapshot(p.string(), s);
        all += read_text(p.string());
    }
    return all;
}

std::string tree_manifest(const fs::path& dir) { return read_text((dir / "manifest.txt").string()); }

Outcome criterion10() {
    const fs::path root = fs::temp_directory_path() / ("mvns_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root / "a");
    fs::create_directories(root / "b");
    const StaticPair p1 = static_pair(), p2 = static_pair();
    bool ok = trajectory_csv(p1.sde) == trajectory_csv(p2.sde) && trajectory_csv(p1.oracle) == trajectory_csv(p2.oracle);
    ok = ok && snapshot_bytes(p1.sde, root / "a") == snapshot_bytes(p2.sde, root / "b");
    ok = ok && snapshot_bytes(p1.oracle, root / "a") == snapshot_bytes(p2.oracle, root / "b");
    const bool static_ok = ok;

    const fs::path cfg = root / "cfg.ini";
    std::ofstream(cfg) << "[motion]\nkind = shear\namplitude = 0.2\nomega = 2\n"
                          "[grid]\nn = 16\n[time]\nT = 0.05\ndt = 0.001\n"
                          "[noise]\nK = 4\ncoupling = multiplicative\namplitude = 1\n"
                          "[initial]\nkind = vortex\namplitude = 4\n"
                          "[cutoff]\nN0 = 2\nsweep = 1, 2\n"
                          "[rereference]\nmode = auto\nmax_interval = 0.02\n"
                          "[ensemble]\nsize = 3\nseed = 9\n"
                          "[output]\nsample_every = 5\nsnapshot_every = 10\n"
                          "[audit]\nsamples = 6\ndelta_points = 4\ndelta_steps = 8\n";
    std::ostringstream log;
    auto opts = [&](const std::string& out, int workers) {
        app::Options o;
        o.config_path = cfg.string();
        o.out_dir = (root / out).string();
        o.workers = workers;
        return o;
    };
    bool runs_ok = app::run(opts("r1", 1), log) == 0 && app::run(opts("r2", 2), log) == 0;
    runs_ok = runs_ok && tree_manifest(root / "r1") == tree_manifest(root / "r2");
    bool audits_ok = true;
    for (const char* which : {"norms", "iota", "delta", "moment"}) {
        const std::string a = std::string("audit_") + which + "_1", b = std::string("audit_") + which + "_2";
        audits_ok = audits_ok && app::audit(opts(a, 1), which, log) == 0 && app::audit(opts(b, 2), which, log) == 0;
        audits_ok = audits_ok && tree_manifest(root / a) == tree_manifest(root / b);
    }
    fs::remove_all(root);
    return {static_ok && runs_ok && audits_ok, std::string("static rerun ") + (static_ok ? "identical" : "DIFFERS") +
                                                   ", CLI run manifests " + (runs_ok ? "identical" : "DIFFER") +
                                                   ", audit manifests " + (audits_ok ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> all = {
        {"static-domain oracle equivalence", 30, criterion1},
        {"Piola divergence preservation", 10, criterion2},
        {"weak-form identity", 30, criterion3},
        {"cutoff properties", 1, criterion4},
        {"escalation consistency", 60, criterion5},
        {"Theta moment uniformity", 600, criterion6},
        {"re-reference gluing", 60, criterion7},
        {"delta positivity", 60, criterion8},
        {"norm ordering", 60, criterion9},
        {"determinism", 120, criterion10},
    };
    int failures = 0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = all[k].fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= all[k].budget_s;
        if (o.pass && !pass) o.detail += " (over time budget)";
        failures += !pass;
        std::printf("%s criterion %zu (%s): %s [%.2f s / %.0f s]\n", pass ? "PASS" : "FAIL", k + 1, all[k].name,
                    o.detail.c_str(), secs, all[k].budget_s);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(all.size()) - failures, all.size());
    return failures == 0 ? 0 : 1;
}
