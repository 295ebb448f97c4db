#include <iostream>
#include <string>
#include <vector>

#include "standbyrel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return standbyrel::cli::run(args, std::cout, std::cerr);
}
