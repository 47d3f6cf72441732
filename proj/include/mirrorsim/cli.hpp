#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mirrorsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand (predict-cyl, predict-gauss, synth, scan, analyze,
// profile, calibrate). argv[0] is the program name. Returns the exit code.
int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mirrorsim
