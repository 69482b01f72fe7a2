#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oppnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "OPPNET_OUT_DIR";

/// Entry point without the program name: `run ...`, `compare ...`,
/// `export-trace ...`. Results go to files; `out` gets the summary and
/// `err` gets progress and diagnostics.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oppnet::cli
