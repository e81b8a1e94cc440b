#include <iostream>

#include "pouw/cli.hpp"

int main(int argc, char** argv) { return pouw::cli::run(argc, argv, std::cout, std::cerr); }
