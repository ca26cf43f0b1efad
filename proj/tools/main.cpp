#include <iostream>

#include "remix/cli.hpp"

int main(int argc, char** argv) { return remix::cli::run(argc, argv, std::cout, std::cerr); }
