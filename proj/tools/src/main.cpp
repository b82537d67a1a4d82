#include <iostream>

#include "geoaug/cli/commands.hpp"

int main(int argc, char** argv) { return geoaug::cli::run(argc, argv, std::cout, std::cerr); }
