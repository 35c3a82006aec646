#include <iostream>

#include "chf/cli.hpp"

int main(int argc, char** argv) { return chf::cli::run(argc, argv, std::cout, std::cerr); }
