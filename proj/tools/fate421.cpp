#include "fate421/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fate421::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
