#include <iostream>

#include "ibprof/cli/commands.hpp"

int main(int argc, char** argv) { return ibprof::cli::run(argc, argv, std::cout, std::cerr); }
