#include <iostream>
#include <string>
#include <vector>

#include "mfbm3d_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mfbm3d::cli::run(args, std::cout, std::cerr);
}
