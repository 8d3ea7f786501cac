#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socsamp {

// Exit codes: 0 success, 2 input error, 3 resource/cap error, 4 internal
// numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitCapExceeded = 3;
inline constexpr int kExitNumericFailure = 4;

// Runs one CLI invocation (args exclude the program name). All file outputs
// land under --out; a manifest.json records the resolved run.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Re-runs the command recorded in a manifest, writing into out_dir. Embedded
// configurations are materialized, so the manifest alone suffices.
int replay_manifest(const std::string& manifest_path, const std::string& out_dir,
                    std::ostream& out, std::ostream& err);

}  // namespace socsamp
