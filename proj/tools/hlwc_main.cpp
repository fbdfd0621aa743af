#include <iostream>
#include <string>
#include <vector>

#include "hlwc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hlwc::run_cli(args, std::cout, std::cerr);
}
