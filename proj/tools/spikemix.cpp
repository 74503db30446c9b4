// Apache License, Version 2.0, refer to LICENSE.txt

#include <iostream>
#include <string>
#include <vector>

#include "spikemix/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return spikemix::cli::run_cli(args, std::cout, std::cerr);
}
