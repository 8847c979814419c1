#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mvns/diagnostics.hpp"
#include "mvns/state.hpp"

namespace mvns {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory rows as CSV (one row per sample or event).
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

std::string energy_csv(const std::vector<EnergyRow>& rows);

/// Binary snapshot: "MVNSSNAP", u32 version, u32 n, f64 time, u64 step, then per component
/// u32 component id, u32 nx, u32 ny and nx*ny little-endian f64 (i fastest). A .txt sidecar
/// describes the layout.
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Full trajectory state for bit-exact resume.
void write_checkpoint(const std::string& path, const Trajectory& traj);
Trajectory read_checkpoint(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::string& path);

/// manifest.txt listing the config hash, the version and every file with its content hash.
void write_manifest(const std::string& dir, const std::string& config_text, const std::vector<std::string>& files);

}  // namespace mvns
