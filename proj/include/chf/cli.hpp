#pragma once

#include <ostream>

namespace chf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;  ///< validation findings or failed energy gate
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `chfkit` tool. Results go to `out` (or files), all
/// diagnostics to `err`. The default config file comes from $CHFKIT_CONFIG.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chf::cli
