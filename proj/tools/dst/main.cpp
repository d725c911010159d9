#include <iostream>
#include <string>
#include <vector>

#include "dst_app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dst::app::run_cli(args, std::cout, std::cerr);
}
