#include <iostream>

#include "subres/cli/commands.hpp"

int main(int argc, char** argv) { return subres::cli::run_cli(argc, argv, std::cout, std::cerr); }
