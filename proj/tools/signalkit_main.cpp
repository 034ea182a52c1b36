#include <iostream>

#include "signalkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return signalkit::run_command(args, std::cout, std::cerr);
}
