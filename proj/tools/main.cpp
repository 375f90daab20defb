#include <iostream>

#include "lmgeo/cli.hpp"

int main(int argc, char** argv) {
  return lmgeo::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
