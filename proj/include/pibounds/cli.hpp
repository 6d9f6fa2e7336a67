#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pibounds::cli {

enum class Command { Analyze, Bound, Verify, Sweep };
enum class Measure { Inertia, MaxCorr, ChiSquared, MutualInformation };
enum class Format { Json, Csv, Text };
enum class SweepParam { Theta, Lambda1, M };

inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
    Command command = Command::Analyze;
    std::optional<std::string> input_path;
    Measure measure = Measure::Inertia;
    std::optional<double> theta;
    std::optional<std::size_t> M;
    std::optional<std::size_t> k;
    std::optional<double> beta;
    std::uint64_t seed = kDefaultSeed;
    /// Overrides the per-sweep instance counts of `verify`.
    std::optional<std::size_t> instances;
    std::size_t jobs = 1;
    /// Defaults to csv for `sweep` and json otherwise.
    std::optional<Format> format;
    SweepParam param = SweepParam::Theta;
    std::size_t steps = 21;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitBadFlags = 2;
inline constexpr int kExitInvalidInput = 3;

/// Parses `args` (without the program name) and runs the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs an already parsed configuration.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pibounds::cli
