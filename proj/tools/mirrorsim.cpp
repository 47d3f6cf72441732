#include <iostream>

#include "mirrorsim/cli.hpp"

int main(int argc, char** argv) { return mirrorsim::cli_dispatch(argc, argv, std::cout, std::cerr); }
