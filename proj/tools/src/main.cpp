#include <iostream>

#include "ljp_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ljp::cli::run(args, std::cout, std::cerr);
}
