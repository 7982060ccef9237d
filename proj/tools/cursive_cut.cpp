#include <iostream>

#include "cursive/cli.hpp"

int main(int argc, char** argv) { return cursive::cli::run(argc, argv, std::cout, std::cerr); }
