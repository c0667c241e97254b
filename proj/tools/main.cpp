#include <iostream>

#include "ueassign/cli.hpp"

int main(int argc, char** argv) { return ueassign::cli::run(argc, argv, std::cout, std::cerr); }
