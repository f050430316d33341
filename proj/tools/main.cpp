#include <iostream>
#include <string>
#include <vector>

#include "thematic/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return thematic::cli::run(args, std::cout, std::cerr);
}
