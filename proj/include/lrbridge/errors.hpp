#pragma once

#include <stdexcept>
#include <string>

namespace lrbridge {

// Process exit codes used by the CLI. Stable across versions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitParse = 65;
inline constexpr int kExitIo = 74;

// Violated mathematical precondition (parameter out of domain).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Malformed input file. line < 0 means "no line information".
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line(line) {}
    long line;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation could not reach min_converted within max_resample_attempts.
struct insufficient_conversions : std::runtime_error {
    insufficient_conversions(long best, int attempts)
        : std::runtime_error("insufficient conversions: best attempt converted " +
                             std::to_string(best) + " customers in " + std::to_string(attempts) +
                             " attempts"),
          best_converted(best), attempts_used(attempts) {}
    long best_converted;
    int attempts_used;
};

}  // namespace lrbridge
