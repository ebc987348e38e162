#include <iostream>
#include <string>
#include <vector>

#include "affine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return affine::cli::dispatch(std::move(args), std::cout, std::cerr);
}
