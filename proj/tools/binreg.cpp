#include <iostream>
#include <string>
#include <vector>

#include "binreg/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return binreg::cli::run(args, std::cout, std::cerr);
}
