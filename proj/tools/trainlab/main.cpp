#include <iostream>

#include "trainlab/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  return trainlab::cli::dispatch(args, std::cout, std::cerr, std::cin);
}
