#include <iostream>

#include "omerg_cli.hpp"

int main(int argc, char** argv) { return omerg::cli::run(argc, argv, std::cout, std::cerr); }
