#include <iostream>
#include <string>
#include <vector>

#include "cutwalk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cutwalk::cli::run(std::move(args), std::cout, std::cerr);
}
