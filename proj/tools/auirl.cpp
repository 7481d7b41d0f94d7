#include <iostream>

#include "auirl/cli.hpp"

int main(int argc, char **argv) { return auirl::run_cli(argc, argv, std::cout, std::cerr); }
