#include <iostream>
#include <string>
#include <vector>

#include "geolab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return geolab::run_cli(args, std::cout, std::cerr);
}
