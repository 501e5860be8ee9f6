#include <iostream>

#include "xiaudit/cli.hpp"

int main(int argc, char** argv) { return xiaudit::run_cli(argc, argv, std::cout, std::cerr); }
