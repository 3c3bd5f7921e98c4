#include <iostream>
#include <string>
#include <vector>

#include "aninorm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aninorm::cli_dispatch(args, std::cout, std::cerr);
}
