#include <iostream>

#include "oppnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return oppnet::cli::main(args, std::cout, std::cerr);
}
