#include <iostream>

#include "catkerr/cli.hpp"

int main(int argc, char** argv) { return catkerr::run_cli(argc, argv, std::cout, std::cerr); }
