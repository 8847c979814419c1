#include "mvns/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mvns {

namespace fs = std::filesystem;

namespace {

constexpr char kSnapMagic[8] = {'M', 'V', 'N', 'S', 'S', 'N', 'A', 'P'};
constexpr char kCkptMagic[8] = {'M', 'V', 'N', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_parent(const std::string& path) {
    const fs::path p = fs::path(path).parent_path();
    if (p.empty()) return;
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

class Writer {
public:
    template <class T>
    void put(const T& v) {
        const char* p = reinterpret_cast<const char*>(&v);
        buf_.append(p, sizeof(T));
    }
    void put_str(const std::string& s) {
        put(std::uint64_t(s.size()));
        buf_.append(s);
    }
    void put_array(const Array2& a) {
        put(std::uint32_t(a.nx));
        put(std::uint32_t(a.ny));
        buf_.append(reinterpret_cast<const char*>(a.a.data()), a.a.size() * sizeof(double));
    }
    void put_field(const VectorField& v) {
        put(std::uint32_t(v.grid.n));
        for (int c = 0; c < 2; ++c) put_array(v.c[c]);
    }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(std::string bytes, std::string path) : buf_(std::move(bytes)), path_(std::move(path)) {}
    template <class T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_str() {
        const auto n = get<std::uint64_t>();
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void get_array(Array2& a) {
        const int nx = int(get<std::uint32_t>()), ny = int(get<std::uint32_t>());
        if (nx != a.nx || ny != a.ny) throw IoError(path_ + ": array shape mismatch");
        need(a.a.size() * sizeof(double));
        std::memcpy(a.a.data(), buf_.data() + pos_, a.a.size() * sizeof(double));
        pos_ += a.a.size() * sizeof(double);
    }
    VectorField get_field() {
        const int n = int(get<std::uint32_t>());
        if (n < 1 || n > 1 << 14) throw IoError(path_ + ": bad grid size");
        VectorField v(Grid::make(n));
        for (int c = 0; c < 2; ++c) get_array(v.c[c]);
        return v;
    }
    void expect_magic(const char (&m)[8]) {
        need(8);
        if (std::memcmp(buf_.data() + pos_, m, 8) != 0) throw IoError(path_ + ": bad magic");
        pos_ += 8;
    }
    bool done() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw IoError(path_ + ": truncated file");
    }
    std::string buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

void write_bytes(const std::string& path, const std::string& bytes) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "kind,step,t,t0,N,norm_0t,norm_1t,theta,dissipation,deviation,old_t0\n";
    for (const auto& r : traj.rows)
        os << r.kind << ',' << r.step << ',' << fmt(r.t) << ',' << fmt(r.t0) << ',' << fmt(r.N) << ','
           << fmt(r.norm_0t) << ',' << fmt(r.norm_1t) << ',' << fmt(r.theta) << ',' << fmt(r.dissipation) << ','
           << fmt(r.deviation) << ',' << fmt(r.old_t0) << '\n';
    return os.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) { write_text(path, trajectory_csv(traj)); }

std::string energy_csv(const std::vector<EnergyRow>& rows) {
    std::ostringstream os;
    os << "t,l2_moving,norm_1t,theta,dissipation_increment\n";
    for (const auto& r : rows)
        os << fmt(r.t) << ',' << fmt(r.l2_moving) << ',' << fmt(r.norm_1t) << ',' << fmt(r.theta) << ','
           << fmt(r.dissipation_increment) << '\n';
    return os.str();
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
    Writer w;
    for (char ch : kSnapMagic) w.put(ch);
    w.put(kVersion);
    w.put(std::uint32_t(snap.v.grid.n));
    w.put(snap.t);
    w.put(std::uint64_t(snap.step));
    for (int c = 0; c < 2; ++c) {
        w.put(std::uint32_t(c));
        w.put_array(snap.v.c[c]);
    }
    write_bytes(path, w.bytes());
    std::ostringstream side;
    const int n = snap.v.grid.n;
    side << "format = mvns-snapshot\nversion = " << kVersion << "\nn = " << n << "\nt = " << fmt(snap.t)
         << "\nstep = " << snap.step << "\nendianness = little\n"
         << "component 0 = u1 at (i dx, (j+1/2) dx), shape " << n + 1 << " x " << n << ", i fastest\n"
         << "component 1 = u2 at ((i+1/2) dx, j dx), shape " << n << " x " << n + 1 << ", i fastest\n";
    write_text(path + ".txt", side.str());
}

Snapshot read_snapshot(const std::string& path) {
    Reader r(read_text(path), path);
    r.expect_magic(kSnapMagic);
    if (r.get<std::uint32_t>() != kVersion) throw IoError(path + ": unsupported snapshot version");
    const int n = int(r.get<std::uint32_t>());
    if (n < 1 || n > 1 << 14) throw IoError(path + ": bad grid size");
    Snapshot s;
    s.t = r.get<double>();
    s.step = r.get<std::uint64_t>();
    s.v = VectorField(Grid::make(n));
    for (int c = 0; c < 2; ++c) {
        if (r.get<std::uint32_t>() != std::uint32_t(c)) throw IoError(path + ": bad component id");
        r.get_array(s.v.c[c]);
    }
    if (!r.done()) throw IoError(path + ": trailing bytes");
    return s;
}

void write_checkpoint(const std::string& path, const Trajectory& tr) {
    Writer w;
    for (char ch : kCkptMagic) w.put(ch);
    w.put(kVersion);
    const SolverState& s = tr.state;
    w.put(s.t);
    w.put(s.t0);
    w.put(s.N.N);
    w.put(s.seed);
    w.put(s.step);
    w.put_field(s.v);
    w.put(tr.theta_sup);
    w.put(tr.dissipation);
    w.put(std::uint8_t(tr.ceiling_hit));
    w.put(std::uint64_t(tr.rows.size()));
    for (const auto& r : tr.rows) {
        w.put_str(r.kind);
        w.put(r.step);
        for (double x : {r.t, r.t0, r.N, r.norm_0t, r.norm_1t, r.theta, r.dissipation, r.deviation, r.old_t0}) w.put(x);
    }
    for (const auto* v : {&tr.tau_hits, &tr.rereference_times}) {
        w.put(std::uint64_t(v->size()));
        for (double x : *v) w.put(x);
    }
    w.put(std::uint64_t(tr.snapshots.size()));
    for (const auto& sn : tr.snapshots) {
        w.put(sn.t);
        w.put(sn.step);
        w.put_field(sn.v);
    }
    const std::string tmp = path + ".tmp";
    write_bytes(tmp, w.bytes());
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Trajectory read_checkpoint(const std::string& path) {
    Reader r(read_text(path), path);
    r.expect_magic(kCkptMagic);
    if (r.get<std::uint32_t>() != kVersion) throw IoError(path + ": unsupported checkpoint version");
    Trajectory tr;
    SolverState& s = tr.state;
    s.t = r.get<double>();
    s.t0 = r.get<double>();
    s.N.N = r.get<double>();
    s.seed = r.get<std::uint64_t>();
    s.step = r.get<std::uint64_t>();
    s.v = r.get_field();
    tr.theta_sup = r.get<double>();
    tr.dissipation = r.get<double>();
    tr.ceiling_hit = r.get<std::uint8_t>() != 0;
    const auto nrows = r.get<std::uint64_t>();
    for (std::uint64_t k = 0; k < nrows; ++k) {
        TrajectoryRow row;
        row.kind = r.get_str();
        row.step = r.get<std::uint64_t>();
        for (double* x : {&row.t, &row.t0, &row.N, &row.norm_0t, &row.norm_1t, &row.theta, &row.dissipation,
                          &row.deviation, &row.old_t0})
            *x = r.get<double>();
        tr.rows.push_back(std::move(row));
    }
    for (auto* v : {&tr.tau_hits, &tr.rereference_times}) {
        const auto m = r.get<std::uint64_t>();
        for (std::uint64_t k = 0; k < m; ++k) v->push_back(r.get<double>());
    }
    const auto nsnap = r.get<std::uint64_t>();
    for (std::uint64_t k = 0; k < nsnap; ++k) {
        Snapshot sn;
        sn.t = r.get<double>();
        sn.step = r.get<std::uint64_t>();
        sn.v = r.get_field();
        tr.snapshots.push_back(std::move(sn));
    }
    if (!r.done()) throw IoError(path + ": trailing bytes");
    return tr;
}

void write_text(const std::string& path, const std::string& text) { write_bytes(path, text); }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return os.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(hex[md[k] >> 4]);
        out.push_back(hex[md[k] & 15]);
    }
    return out;
}

std::string file_sha256(const std::string& path) { return sha256_hex(read_text(path)); }

void write_manifest(const std::string& dir, const std::string& config_text, const std::vector<std::string>& files) {
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream os;
    os << "mvns_version = 0.1.0\n";
    os << "snapshot_format_version = " << kVersion << "\n";
    os << "config_sha256 = " << sha256_hex(config_text) << "\n";
    for (const auto& f : sorted) os << "file " << f << " " << file_sha256((fs::path(dir) / f).string()) << "\n";
    write_text((fs::path(dir) / "manifest.txt").string(), os.str());
}

}  // namespace mvns
