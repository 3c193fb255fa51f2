#include <iostream>

#include "sepint/cli.hpp"

int main(int argc, char** argv) { return sepint::cli::run(argc, argv, std::cout, std::cerr); }
