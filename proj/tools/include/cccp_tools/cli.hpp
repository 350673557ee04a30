#pragma once

// The `cccp` command line, callable in-process for tests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cccp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDomain = 3, kIo = 4 };

inline constexpr const char* kSeedEnvVar = "CCCP_SEED";
inline constexpr std::uint64_t kFallbackSeed = 42;

struct Environment {
  std::optional<std::string> seed;  // value of CCCP_SEED, if set
};

/// Reads CCCP_SEED from the process environment.
Environment process_environment();

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = {});

/// Version line printed by --version.
std::string version_string();

}  // namespace cccp::cli
