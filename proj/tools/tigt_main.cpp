#include <iostream>

#include "tigt/cli.hpp"

int main(int argc, char** argv) { return tigt::run_cli(argc, argv, std::cout, std::cerr); }
