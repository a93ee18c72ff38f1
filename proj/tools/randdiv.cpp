#include <iostream>

#include "randdiv/cli.hpp"

int main(int argc, char** argv) { return randdiv::cli::run(argc, argv, std::cout, std::cerr); }
