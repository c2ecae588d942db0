#include <iostream>

#include "bshadow/cli.hpp"

int main(int argc, char** argv) { return bshadow::cli::run(argc, argv, std::cout, std::cerr); }
