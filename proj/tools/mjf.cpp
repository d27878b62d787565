#include <iostream>

#include "mjf/runner.hpp"

int main(int argc, char** argv) { return mjf::run_cli(argc, argv, std::cout, std::cerr); }
