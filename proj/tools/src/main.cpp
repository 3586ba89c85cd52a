#include <iostream>

#include "phimi/cli.hpp"

int main(int argc, char** argv) {
  return phimi::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
