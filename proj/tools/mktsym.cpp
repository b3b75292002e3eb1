#include <iostream>

#include "mktsym/cli/commands.hpp"

int main(int argc, char** argv) { return mktsym::cli::run(argc, argv, std::cout, std::cerr); }
