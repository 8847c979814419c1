#include "mvns/app.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "mvns/config.hpp"
#include "mvns/diagnostics.hpp"
#include "mvns/io.hpp"
#include "mvns/metric_inner.hpp"
#include "mvns/sde.hpp"

namespace mvns::app {

namespace fs = std::filesystem;

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int k = next++; k < count; k = next++) {
            try {
                fn(k);
            } catch (...) {
                errors[std::size_t(k)] = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min(workers, count));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short form for time labels inside report keys.
std::string label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string member_dir(int m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "member_%03d", m);
    return buf;
}

struct Setup {
    RunConfig cfg;
    std::string hash_text;  ///< config source plus effective overrides
};

Setup load(const Options& opt) {
    Setup s{load_config(opt.config_path), {}};
    if (opt.seed) s.cfg.seed = *opt.seed;
    if (opt.out_dir) s.cfg.out_dir = *opt.out_dir;
    if (opt.workers) {
        if (*opt.workers < 1) throw ConfigError("--workers", "must be at least 1");
        s.cfg.workers = *opt.workers;
    }
    s.hash_text = s.cfg.source + "\n# effective seed = " + std::to_string(s.cfg.seed) + "\n";
    if (s.cfg.C0_from_audit) {
        const Grid g = Grid::make(s.cfg.n);
        const AuditReport r = norm_equivalence_audit(g, random_solenoidal_samples(g, s.cfg.audit_samples, s.cfg.seed));
        s.cfg.policy.C0 = r.get("C0");
    }
    return s;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        log << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        log << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const SolverError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
}

/// Writes the member's outputs; returns the list of relative paths.
std::vector<std::string> write_member(const std::string& root, int m, const Trajectory& tr) {
    const std::string dir = member_dir(m);
    std::vector<std::string> files;
    auto put = [&](const std::string& rel, const std::string& text) {
        write_text((fs::path(root) / rel).string(), text);
        files.push_back(rel);
    };
    put(dir + "/trajectory.csv", trajectory_csv(tr));
    put(dir + "/energy.csv", energy_csv(energy_series(tr)));
    for (const auto& sn : tr.snapshots) {
        char name[48];
        std::snprintf(name, sizeof name, "/snap_%08llu.bin", static_cast<unsigned long long>(sn.step));
        const std::string rel = dir + name;
        write_snapshot((fs::path(root) / rel).string(), sn);
        files.push_back(rel);
        files.push_back(rel + ".txt");
    }
    const std::string ck = dir + "/checkpoint.bin";
    write_checkpoint((fs::path(root) / ck).string(), tr);
    files.push_back(ck);
    return files;
}

struct MemberResult {
    Trajectory traj;
    bool stopped = false;
};

int finish_run(const Setup& s, const Options& opt, std::vector<MemberResult>& results, std::ostream& log) {
    const std::string& root = s.cfg.out_dir;
    bool any_stopped = false;
    for (const auto& r : results) any_stopped = any_stopped || r.stopped;
    if (any_stopped) {
        log << "stopped after step " << *opt.stop_after << "; checkpoints written to " << root << "\n";
        return kOk;
    }
    std::vector<std::string> files;
    std::ostringstream summary;
    summary << "member,seed,ceiling_hit,escalations,rereferences,theta_sup,dissipation,final_N,final_norm_1t\n";
    for (std::size_t m = 0; m < results.size(); ++m) {
        const Trajectory& tr = results[m].traj;
        auto f = write_member(root, int(m), tr);
        files.insert(files.end(), f.begin(), f.end());
        const double n1 = tr.rows.empty() ? 0.0 : tr.rows.back().norm_1t;
        summary << m << ',' << tr.state.seed << ',' << (tr.ceiling_hit ? 1 : 0) << ',' << tr.tau_hits.size() << ','
                << tr.rereference_times.size() << ',' << fmt(tr.theta_sup) << ',' << fmt(tr.dissipation) << ','
                << fmt(tr.state.N.N) << ',' << fmt(n1) << '\n';
        if (tr.ceiling_hit) log << "member " << m << ": cutoff ceiling reached (non-terminated trajectory)\n";
    }
    write_text((fs::path(root) / "summary.csv").string(), summary.str());
    files.push_back("summary.csv");
    write_manifest(root, s.hash_text, files);
    log << "wrote " << files.size() << " files and manifest to " << root << "\n";
    return kOk;
}

std::vector<MemberResult> drive(const Setup& s, const Options& opt, bool from_checkpoint) {
    const SimulationConfig sim = make_simulation(s.cfg);
    std::vector<MemberResult> results(std::size_t(s.cfg.ensemble));
    const std::string root = s.cfg.out_dir;
    const int ck_every = s.cfg.checkpoint_every;
    parallel_for(s.cfg.ensemble, s.cfg.workers, [&](int m) {
        const std::string ck = (fs::path(root) / member_dir(m) / "checkpoint.bin").string();
        bool stopped = false;
        const StepHook hook = [&](const SolverState& st, const Trajectory& tr) {
            if (ck_every > 0 && st.step % std::uint64_t(ck_every) == 0) write_checkpoint(ck, tr);
            if (opt.stop_after && st.step >= *opt.stop_after) {
                write_checkpoint(ck, tr);
                stopped = true;
                return false;
            }
            return true;
        };
        Trajectory tr;
        if (from_checkpoint) {
            Trajectory saved = read_checkpoint(ck);
            if (saved.state.seed != s.cfg.seed + std::uint64_t(m))
                throw ConfigError("ensemble.seed", "checkpoint seed does not match the configuration");
            tr = resume(sim, std::move(saved), hook);
        } else {
            tr = simulate(sim, s.cfg.seed + std::uint64_t(m), hook);
        }
        results[std::size_t(m)] = {std::move(tr), stopped};
    });
    return results;
}

std::vector<double> audit_times(const RunConfig& c) {
    if (!c.audit_times.empty()) return c.audit_times;
    return {0.0, 0.5 * c.T, c.T};
}

void prefix_into(AuditReport& dst, const std::string& prefix, const AuditReport& src) {
    for (const auto& [k, v] : src.values) dst.values[prefix + k] = v;
}

AuditReport audit_norms(const RunConfig& c) {
    AuditReport out;
    out.meta["audit"] = "norms";
    out.meta["motion"] = make_motion(c).describe();
    const int sizes[2] = {c.n, 2 * c.n};
    AuditReport r[2];
    for (int s = 0; s < 2; ++s) {
        const Grid g = Grid::make(sizes[s]);
        r[s] = norm_equivalence_audit(g, random_solenoidal_samples(g, c.audit_samples, c.seed));
        prefix_into(out, "n=" + std::to_string(sizes[s]) + ".", r[s]);
    }
    for (const auto& [k, v] : r[0].values) {
        if (k == "samples" || k == "ordering_violations") continue;
        const double w = r[1].get(k);
        out.set("refinement_change." + k, std::abs(w - v) / std::max(std::abs(v), 1e-300));
    }
    const DomainMotion motion = make_motion(c);
    const Grid g = Grid::make(c.n);
    const auto samples = random_solenoidal_samples(g, std::min(c.audit_samples, 8), c.seed);
    out.set("c1", c1_constant(motion, audit_times(c), g, samples));
    for (double t : audit_times(c)) out.set("phi_proxy.t=" + label(t), phi_proxy(motion, t, g, samples));
    return out;
}

AuditReport audit_iota(const RunConfig& c) {
    AuditReport out;
    out.meta["audit"] = "iota";
    const DomainMotion motion = make_motion(c);
    out.meta["motion"] = motion.describe();
    const Grid g = Grid::make(c.n);
    const auto probes = default_probes(g);
    for (double t : audit_times(c)) prefix_into(out, "t=" + label(t) + ".", iota_audit(motion, t, g, probes));
    return out;
}

AuditReport audit_delta(const RunConfig& c) {
    AuditReport out;
    out.meta["audit"] = "delta";
    const DomainMotion motion = make_motion(c);
    out.meta["motion"] = motion.describe();
    std::vector<double> t0s;
    const int P = c.delta_points;
    for (int k = 0; k < P; ++k) t0s.push_back(P == 1 ? 0.0 : c.T * double(k) / double(P - 1));
    const Grid grid = Grid::make(c.n);
    const DeltaEstimate est = estimate_delta(c.policy, motion, grid, t0s, c.delta_steps);
    out.set("delta", est.delta);
    out.set("resolution", est.resolution);
    out.set("max_interval", c.policy.max_interval);
    out.set("threshold", c.policy.deviation_threshold());
    for (std::size_t k = 0; k < est.t0_samples.size(); ++k)
        out.set("first_trigger.t0=" + label(est.t0_samples[k]), est.first_trigger[k]);

    // every built-in family at the configured amplitude and frequency
    const double h = motion.t_max();
    std::vector<DomainMotion> families = {DomainMotion::identity(h), DomainMotion::rotation(c.motion_omega, h),
                                          DomainMotion::shear(c.motion_amplitude, c.motion_omega, h),
                                          DomainMotion::wavy(c.motion_amplitude, c.motion_omega, h)};
    if (!c.motion_table.empty()) families.push_back(DomainMotion::table(c.motion_table, h));
    for (const auto& m : families)
        out.set("delta." + to_string(m.kind()), estimate_delta(c.policy, m, grid, t0s, c.delta_steps).delta);
    return out;
}

AuditReport audit_moment(const RunConfig& c, int workers) {
    std::vector<double> sweep = c.cutoff_sweep;
    if (sweep.empty()) {
        if (!std::isfinite(c.N0)) throw ConfigError("cutoff.sweep", "moment audit needs a sweep or a finite cutoff.N0");
        sweep = {c.N0};
    }
    if (c.ensemble < 2) throw ConfigError("ensemble.size", "moment audit needs at least two members");
    const int E = c.ensemble;
    std::vector<Trajectory> trajs(sweep.size() * std::size_t(E));
    parallel_for(int(trajs.size()), workers, [&](int k) {
        SimulationConfig sim = make_simulation(c, sweep[std::size_t(k / E)]);
        sim.escalate = false;
        sim.snapshot_every = 0;
        trajs[std::size_t(k)] = simulate(sim, c.seed + std::uint64_t(k % E));
    });
    std::vector<EnsembleEntry> ens;
    for (std::size_t k = 0; k < trajs.size(); ++k) ens.push_back({sweep[k / std::size_t(E)], &trajs[k]});
    const SimulationConfig sim = make_simulation(c);
    const OperatorBundle b = OperatorBundle::build(sim.motion, 0.0, 0.0, sim.grid);
    const VectorField u0 = leray_project(sim.v0, c.step.proj_tol);
    const double h1 = norm_1t(u0, b.metric), l2 = norm_0t(u0, b.metric);
    AuditReport r = moment_audit(ens, h1 * h1, l2 * l2);
    r.meta["motion"] = sim.motion.describe();
    r.meta["coupling"] = to_string(c.coupling);
    r.set("u0_h1_sq", h1 * h1);
    r.set("u0_l2_sq", l2 * l2);
    return r;
}

}  // namespace

int run(const Options& opt, std::ostream& log) {
    return guarded(log, [&] {
        const Setup s = load(opt);
        log << "run: " << s.cfg.ensemble << " member(s), motion " << s.cfg.motion << ", n = " << s.cfg.n << "\n";
        auto results = drive(s, opt, false);
        return finish_run(s, opt, results, log);
    });
}

int resume(const Options& opt, std::ostream& log) {
    return guarded(log, [&] {
        const Setup s = load(opt);
        log << "resume: " << s.cfg.ensemble << " member(s) from " << s.cfg.out_dir << "\n";
        auto results = drive(s, opt, true);
        return finish_run(s, opt, results, log);
    });
}

int validate(const Options& opt, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig c = load_config(opt.config_path);
        const SimulationConfig sim = make_simulation(c);
        log << "config ok: motion " << sim.motion.describe() << ", n = " << c.n << ", steps = " << sim.total_steps()
            << ", members = " << c.ensemble << "\n";
        return int(kOk);
    });
}

int audit(const Options& opt, const std::string& which, std::ostream& log) {
    if (which != "norms" && which != "iota" && which != "delta" && which != "moment") {
        log << "usage error: unknown audit '" << which << "' (expected norms, iota, delta or moment)\n";
        return kConfigError;
    }
    return guarded(log, [&] {
        const Setup s = load(opt);
        AuditReport r;
        if (which == "norms") r = audit_norms(s.cfg);
        else if (which == "iota") r = audit_iota(s.cfg);
        else if (which == "delta") r = audit_delta(s.cfg);
        else r = audit_moment(s.cfg, s.cfg.workers);
        r.meta["n"] = std::to_string(s.cfg.n);
        r.meta["seed"] = std::to_string(s.cfg.seed);
        const std::string rel = "audit_" + which + ".txt";
        write_text((fs::path(s.cfg.out_dir) / rel).string(), r.to_text());
        write_manifest(s.cfg.out_dir, s.hash_text, {rel});
        log << "audit " << which << ": " << r.values.size() << " values written to "
            << (fs::path(s.cfg.out_dir) / rel).string() << "\n";
        if (!r.all_finite()) log << "warning: non-finite audit values present\n";
        return int(kOk);
    });
}

}  // namespace mvns::app
