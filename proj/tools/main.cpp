#include <iostream>
#include <vector>

#include "portlab/report/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return portlab::report::cli_main(args, std::cout, std::cerr);
}
