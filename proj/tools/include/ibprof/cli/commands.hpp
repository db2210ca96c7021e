#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ibprof/genlab.hpp"

namespace ibprof::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndefined = 2;

// "sizes=30x30 p=0.4 q=0.004 seed=7 [weight=1] [model=planted|amplified] [undirected]"
SBMSpec parse_sbm_args(const std::vector<std::string>& args);

std::vector<double> parse_real_list(const std::string& text);

// Runs one command line; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibprof::cli
