#include <iostream>

#include "pathlyap/cli.hpp"

int main(int argc, char** argv) { return pathlyap::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
