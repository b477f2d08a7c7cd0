#include <iostream>

#include "sidonlab/cli.hpp"

int main(int argc, char** argv) { return sidonlab::cli::run(argc, argv, std::cout, std::cerr); }
