#include <iostream>

#include "ksense/cli.hpp"

int main(int argc, char** argv) { return ksense::run_cli(argc, argv, std::cout, std::cerr); }
