#include "csmw_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return csmw::cli::run(argc, argv, std::cout, std::cerr); }
