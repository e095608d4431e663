#include <iostream>

#include "ehgo/cli.hpp"

int main(int argc, char** argv) { return ehgo::run_cli(argc, argv, std::cout, std::cerr); }
