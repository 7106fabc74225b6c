#include <iostream>

#include "lnu/cli.hpp"

int main(int argc, char** argv) {
  return lnu::cli::run(argc, argv, std::cout, std::cerr);
}
