#include <iostream>

#include "actbench/cli.hpp"

int main(int argc, char** argv) {
  return actbench::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
