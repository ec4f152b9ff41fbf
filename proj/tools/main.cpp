#include <iostream>

#include "sharpmtg/cli.hpp"

int main(int argc, char** argv) { return sharpmtg::run_cli(argc, argv, std::cout, std::cerr); }
