#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hasse::cli::dispatch(argc, argv, std::cout, std::cerr); }
