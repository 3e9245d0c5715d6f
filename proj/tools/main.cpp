#include <iostream>

#include "maxent/cli.hpp"

int main(int argc, char** argv) { return maxent::cli::run(argc, argv, std::cout, std::cerr); }
