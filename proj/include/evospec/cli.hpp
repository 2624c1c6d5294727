#pragma once

#include "evospec/config.hpp"

#include <string>

namespace evospec {

inline constexpr const char* kToolVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int certification = 2;
inline constexpr int singular = 3;
inline constexpr int attainment = 4;
inline constexpr int runtime = 5;  // any other numerical failure
}  // namespace exit_code

int exit_code_for(ErrorCode code);

// Each command writes its files into out_dir and returns the exit code; errors
// that abort a command propagate as exceptions.
int cmd_solve(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_stability(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_ivp(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_checklaw(const ProblemConfig& cfg, const std::string& out_dir);

// Full front end: argument parsing, thread setup, dispatch and exit-code mapping.
int run_cli(int argc, const char* const* argv);

}  // namespace evospec
