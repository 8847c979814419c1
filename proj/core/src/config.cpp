#include "mvns/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mvns/io.hpp"

namespace mvns {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : std::runtime_error(field + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + message),
      field_(field),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Line number of section.key in the source text (0 when absent).
int find_line(const std::string& text, const std::string& section, const std::string& key) {
    std::istringstream is(text);
    std::string line, cur;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            cur = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq != std::string::npos && cur == section && trim(t.substr(0, eq)) == key) return no;
    }
    return 0;
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"motion", {"kind", "amplitude", "omega", "table"}},
        {"grid", {"n"}},
        {"time", {"T", "dt", "dt_max"}},
        {"noise", {"K", "coupling", "amplitude"}},
        {"initial", {"kind", "amplitude", "modes", "path"}},
        {"cutoff", {"N0", "ceiling", "escalate", "sweep"}},
        {"rereference", {"mode", "times", "C0", "C0_source", "safety", "max_interval", "drift_threshold"}},
        {"ensemble", {"size", "seed", "workers"}},
        {"output", {"dir", "sample_every", "snapshot_every", "checkpoint_every"}},
        {"solver", {"tol", "proj_tol", "restart", "max_iter"}},
        {"audit", {"samples", "times", "delta_points", "delta_steps"}},
    };
    return s;
}

class Reader {
public:
    Reader(const pt::ptree& tree, const std::string& text) : tree_(tree), text_(text) {}

    bool has(const std::string& sec, const std::string& key) const {
        return tree_.get_optional<std::string>(pt::ptree::path_type(sec + "." + key, '.')).has_value();
    }
    std::string raw(const std::string& sec, const std::string& key) const {
        return trim(tree_.get<std::string>(pt::ptree::path_type(sec + "." + key, '.')));
    }
    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
        throw ConfigError(sec + "." + key, msg, find_line(text_, sec, key));
    }

    void str(const std::string& sec, const std::string& key, std::string& out) const {
        if (has(sec, key)) out = raw(sec, key);
    }
    void num(const std::string& sec, const std::string& key, double& out) const {
        if (!has(sec, key)) return;
        const std::string s = raw(sec, key);
        if (s == "inf" || s == "infinity") {
            out = std::numeric_limits<double>::infinity();
            return;
        }
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            out = v;
        } catch (const std::exception&) {
            fail(sec, key, "expected a number, got '" + s + "'");
        }
    }
    void integer(const std::string& sec, const std::string& key, int& out) const {
        if (!has(sec, key)) return;
        const std::string s = raw(sec, key);
        try {
            std::size_t pos = 0;
            const long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            out = int(v);
        } catch (const std::exception&) {
            fail(sec, key, "expected an integer, got '" + s + "'");
        }
    }
    void u64(const std::string& sec, const std::string& key, std::uint64_t& out) const {
        if (!has(sec, key)) return;
        const std::string s = raw(sec, key);
        try {
            std::size_t pos = 0;
            if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
            const unsigned long long v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            out = v;
        } catch (const std::exception&) {
            fail(sec, key, "expected a nonnegative integer, got '" + s + "'");
        }
    }
    void boolean(const std::string& sec, const std::string& key, bool& out) const {
        if (!has(sec, key)) return;
        const std::string s = raw(sec, key);
        if (s == "true" || s == "1" || s == "yes") out = true;
        else if (s == "false" || s == "0" || s == "no") out = false;
        else fail(sec, key, "expected true/false, got '" + s + "'");
    }
    void list(const std::string& sec, const std::string& key, std::vector<double>& out) const {
        if (!has(sec, key)) return;
        out.clear();
        std::istringstream is(raw(sec, key));
        std::string item;
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                fail(sec, key, "bad list entry '" + item + "'");
            }
        }
    }
    /// "a b; a b; ..." groups of numbers separated by ';'.
    std::vector<std::vector<double>> groups(const std::string& sec, const std::string& key) const {
        std::vector<std::vector<double>> out;
        std::istringstream is(raw(sec, key));
        std::string grp;
        while (std::getline(is, grp, ';')) {
            if (trim(grp).empty()) continue;
            std::istringstream gs(grp);
            std::vector<double> g;
            double x;
            while (gs >> x) g.push_back(x);
            if (!gs.eof()) fail(sec, key, "bad group '" + trim(grp) + "'");
            out.push_back(g);
        }
        return out;
    }

private:
    const pt::ptree& tree_;
    const std::string& text_;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("<syntax>", e.message(), int(e.line()));
    }
    for (const auto& [sec, body] : tree) {
        auto it = schema().find(sec);
        if (it == schema().end() || body.empty())
            throw ConfigError(sec, it == schema().end() ? "unknown section or key outside a section" : "empty section",
                              find_line(text, "", sec));
        for (const auto& [key, val] : body)
            if (!it->second.count(key)) throw ConfigError(sec + "." + key, "unknown key", find_line(text, sec, key));
    }

    const Reader r(tree, text);
    RunConfig c;
    c.source = text;

    r.str("motion", "kind", c.motion);
    r.num("motion", "amplitude", c.motion_amplitude);
    r.num("motion", "omega", c.motion_omega);
    if (r.has("motion", "table")) {
        for (const auto& g : r.groups("motion", "table")) {
            if (g.size() != 3) r.fail("motion", "table", "each term needs 'amplitude omega mode'");
            c.motion_table.push_back({g[0], g[1], int(g[2])});
        }
    }

    r.integer("grid", "n", c.n);
    r.num("time", "T", c.T);
    r.num("time", "dt", c.dt);
    r.num("time", "dt_max", c.dt_max);

    r.integer("noise", "K", c.noise_K);
    r.num("noise", "amplitude", c.noise_amplitude);
    if (r.has("noise", "coupling")) {
        const std::string s = r.raw("noise", "coupling");
        if (s == "additive") c.coupling = Coupling::Additive;
        else if (s == "multiplicative") c.coupling = Coupling::Multiplicative;
        else r.fail("noise", "coupling", "expected additive or multiplicative");
    }

    r.str("initial", "kind", c.initial.kind);
    r.num("initial", "amplitude", c.initial.amplitude);
    r.str("initial", "path", c.initial.path);
    if (r.has("initial", "modes")) {
        for (const auto& g : r.groups("initial", "modes")) {
            if (g.size() != 2) r.fail("initial", "modes", "each mode needs 'a b'");
            c.initial.modes.push_back({int(g[0]), int(g[1])});
        }
    }

    r.num("cutoff", "N0", c.N0);
    r.num("cutoff", "ceiling", c.N_ceiling);
    r.boolean("cutoff", "escalate", c.escalate);
    r.list("cutoff", "sweep", c.cutoff_sweep);

    if (r.has("rereference", "mode")) {
        const std::string s = r.raw("rereference", "mode");
        if (s == "off") c.rereference = RereferenceMode::Off;
        else if (s == "auto") c.rereference = RereferenceMode::Auto;
        else if (s == "forced") c.rereference = RereferenceMode::Forced;
        else r.fail("rereference", "mode", "expected off, auto or forced");
    }
    r.list("rereference", "times", c.forced_times);
    r.num("rereference", "C0", c.policy.C0);
    r.num("rereference", "safety", c.policy.safety);
    r.num("rereference", "max_interval", c.policy.max_interval);
    r.num("rereference", "drift_threshold", c.policy.drift_threshold);
    if (r.has("rereference", "C0_source")) {
        const std::string s = r.raw("rereference", "C0_source");
        if (s == "audit") c.C0_from_audit = true;
        else if (s == "fixed") c.C0_from_audit = false;
        else r.fail("rereference", "C0_source", "expected fixed or audit");
    }

    r.integer("ensemble", "size", c.ensemble);
    r.u64("ensemble", "seed", c.seed);
    r.integer("ensemble", "workers", c.workers);

    r.str("output", "dir", c.out_dir);
    r.integer("output", "sample_every", c.sample_every);
    r.integer("output", "snapshot_every", c.snapshot_every);
    r.integer("output", "checkpoint_every", c.checkpoint_every);

    r.num("solver", "tol", c.step.solve_tol);
    r.num("solver", "proj_tol", c.step.proj_tol);
    r.integer("solver", "restart", c.step.restart);
    r.integer("solver", "max_iter", c.step.max_iter);

    r.integer("audit", "samples", c.audit_samples);
    r.list("audit", "times", c.audit_times);
    r.integer("audit", "delta_points", c.delta_points);
    r.integer("audit", "delta_steps", c.delta_steps);

    try {
        c.validate();
    } catch (const ConfigError& e) {
        const auto dot = e.field().find('.');
        if (dot == std::string::npos || e.line() > 0) throw;
        const std::string sec = e.field().substr(0, dot), key = e.field().substr(dot + 1);
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw ConfigError(e.field(), msg, find_line(text, sec, key));
    }
    return c;
}

void RunConfig::validate() const {
    static const std::set<std::string> motions = {"identity", "rotation", "shear", "wavy", "table"};
    if (!motions.count(motion)) throw ConfigError("motion.kind", "unknown motion family '" + motion + "'");
    if (motion == "table" && motion_table.empty()) throw ConfigError("motion.table", "table motion needs terms");
    if (!std::isfinite(motion_amplitude)) throw ConfigError("motion.amplitude", "must be finite");
    if (!std::isfinite(motion_omega)) throw ConfigError("motion.omega", "must be finite");
    if (n < 8 || n > 512) throw ConfigError("grid.n", "must lie in [8, 512]");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("time.T", "must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt", "must be positive");
    if (dt > dt_max) throw ConfigError("time.dt", "exceeds time.dt_max");
    if (dt > T) throw ConfigError("time.dt", "exceeds time.T");
    if (std::abs(T / dt - std::round(T / dt)) > 1e-9 * (T / dt)) throw ConfigError("time.dt", "must divide time.T");
    if (noise_K < 0 || noise_K > 16) throw ConfigError("noise.K", "must lie in [0, 16]");
    if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude))
        throw ConfigError("noise.amplitude", "must be nonnegative");
    static const std::set<std::string> ics = {"zero", "vortex", "modes", "snapshot"};
    if (!ics.count(initial.kind)) throw ConfigError("initial.kind", "unknown initial condition '" + initial.kind + "'");
    if (initial.kind == "snapshot" && initial.path.empty()) throw ConfigError("initial.path", "snapshot needs a path");
    if (initial.kind == "modes" && initial.modes.empty()) throw ConfigError("initial.modes", "modes needs at least one 'a b'");
    for (const auto& m : initial.modes)
        if (m[0] < 0 || m[1] < 0) throw ConfigError("initial.modes", "mode indices must be nonnegative");
    if (!std::isfinite(initial.amplitude)) throw ConfigError("initial.amplitude", "must be finite");
    if (!(N0 > 0.0)) throw ConfigError("cutoff.N0", "must be positive");
    if (!(N_ceiling >= N0)) throw ConfigError("cutoff.ceiling", "must be at least cutoff.N0");
    for (double N : cutoff_sweep)
        if (!(N > 0.0)) throw ConfigError("cutoff.sweep", "levels must be positive");
    if (!(policy.safety > 0.0 && policy.safety < 1.0)) throw ConfigError("rereference.safety", "must lie in (0,1)");
    if (!(policy.C0 > 0.0) || !std::isfinite(policy.C0)) throw ConfigError("rereference.C0", "must be positive");
    if (!(policy.max_interval > 0.0)) throw ConfigError("rereference.max_interval", "must be positive");
    if (rereference == RereferenceMode::Forced && forced_times.empty())
        throw ConfigError("rereference.times", "forced mode needs times");
    for (double t : forced_times)
        if (!(t > 0.0 && t < T)) throw ConfigError("rereference.times", "times must lie in (0, T)");
    if (ensemble < 1) throw ConfigError("ensemble.size", "must be at least 1");
    if (workers < 1) throw ConfigError("ensemble.workers", "must be at least 1");
    if (out_dir.empty()) throw ConfigError("output.dir", "must not be empty");
    if (sample_every < 1) throw ConfigError("output.sample_every", "must be at least 1");
    if (snapshot_every < 0) throw ConfigError("output.snapshot_every", "must be nonnegative");
    if (checkpoint_every < 0) throw ConfigError("output.checkpoint_every", "must be nonnegative");
    if (!(step.solve_tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    if (!(step.proj_tol > 0.0)) throw ConfigError("solver.proj_tol", "must be positive");
    if (step.restart < 1) throw ConfigError("solver.restart", "must be at least 1");
    if (step.max_iter < 1) throw ConfigError("solver.max_iter", "must be at least 1");
    if (audit_samples < 1) throw ConfigError("audit.samples", "must be at least 1");
    if (delta_points < 1) throw ConfigError("audit.delta_points", "must be at least 1");
    if (delta_steps < 2) throw ConfigError("audit.delta_steps", "must be at least 2");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

DomainMotion make_motion(const RunConfig& c) {
    const double horizon = c.T + c.policy.max_interval;
    if (c.motion == "identity") return DomainMotion::identity(horizon);
    if (c.motion == "rotation") return DomainMotion::rotation(c.motion_omega, horizon);
    if (c.motion == "shear") return DomainMotion::shear(c.motion_amplitude, c.motion_omega, horizon);
    if (c.motion == "wavy") return DomainMotion::wavy(c.motion_amplitude, c.motion_omega, horizon);
    return DomainMotion::table(c.motion_table, horizon);
}

VectorField make_initial(const RunConfig& c, const Grid& g) {
    const double A = c.initial.amplitude;
    const double pi = std::acos(-1.0);
    if (c.initial.kind == "zero") return VectorField(g);
    if (c.initial.kind == "vortex")
        return discrete_curl(g, [A](double x, double y) {
            const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
            return A * b * b * b / 64.0;
        });
    if (c.initial.kind == "modes") {
        const auto modes = c.initial.modes;
        return discrete_curl(g, [A, modes, pi](double x, double y) {
            double s = 0.0;
            for (const auto& m : modes)
                s += std::sin(pi * x) * std::sin(m[0] * pi * x) * std::sin(pi * y) * std::sin(m[1] * pi * y);
            return A * s / (pi * pi);
        });
    }
    Snapshot snap = read_snapshot(c.initial.path);
    if (snap.v.grid != g) throw ConfigError("initial.path", "snapshot grid does not match grid.n");
    return snap.v;
}

SimulationConfig make_simulation(const RunConfig& c, double N0) {
    SimulationConfig s;
    s.motion = make_motion(c);
    s.grid = Grid::make(c.n);
    s.T = c.T;
    s.dt = c.dt;
    s.noise = NoiseModel::make(s.grid, c.noise_K, c.coupling, c.noise_amplitude);
    s.v0 = make_initial(c, s.grid);
    s.N0 = N0;
    s.N_ceiling = c.N_ceiling;
    s.escalate = c.escalate;
    s.rereference = c.rereference;
    s.forced_times = c.forced_times;
    s.policy = c.policy;
    s.sample_every = c.sample_every;
    s.snapshot_every = c.snapshot_every;
    s.step = c.step;
    return s;
}

SimulationConfig make_simulation(const RunConfig& c) { return make_simulation(c, c.N0); }

}  // namespace mvns
