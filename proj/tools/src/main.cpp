#include <iostream>
#include <string>
#include <vector>

#include "gsift/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gsift::cli::dispatch(args, std::cout, std::cerr);
}
