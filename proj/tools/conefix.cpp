#include <iostream>

#include "conefix/cli.hpp"

int main(int argc, char** argv) { return conefix::cli::run_cli(argc, argv, std::cout, std::cerr); }
