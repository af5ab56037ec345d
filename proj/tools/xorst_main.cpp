#include <iostream>
#include <string>
#include <vector>

#include "xorst/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return xorst::run_cli(args, std::cout, std::cerr);
}
