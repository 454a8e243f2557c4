#include <iostream>

#include "fbmclt/cli.hpp"

int main(int argc, char** argv) { return fbmclt::cli::run(argc, argv, std::cout, std::cerr); }
