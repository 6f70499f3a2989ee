#include <iostream>
#include <string>
#include <vector>

#include "cutquad/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cutquad::run_cli(args, std::cout, std::cerr);
}
