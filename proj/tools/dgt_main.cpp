#include <iostream>

#include "dgt_cli.hpp"

int main(int argc, char** argv) { return dgt::cli::run(argc, argv, std::cout, std::cerr); }
