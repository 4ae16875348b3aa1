#include <iostream>
#include <string>
#include <vector>

#include "qrot/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qrot::run_cli(args, std::cout, std::cerr);
}
