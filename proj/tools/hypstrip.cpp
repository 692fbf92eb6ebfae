#include <iostream>

#include "hypstrip/cli.hpp"

int main(int argc, char** argv) { return hypstrip::run_cli(argc, argv, std::cout, std::cerr); }
