#include <iostream>

#include "pilotq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pilotq::cli::run_cli(args, std::cout, std::cerr);
}
