#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace mvns::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    /// Stop every member after this step and leave a checkpoint (interruption drill).
    std::optional<std::uint64_t> stop_after;
};

int run(const Options& opt, std::ostream& log);
int resume(const Options& opt, std::ostream& log);
int validate(const Options& opt, std::ostream& log);
/// which: norms | iota | delta | moment
int audit(const Options& opt, const std::string& which, std::ostream& log);

/// Runs fn(0..count-1) on a pool of `workers` threads; rethrows the lowest-index failure.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace mvns::app
