#include <iostream>

#include "lzchain/cli.hpp"

int main(int argc, char** argv) {
  return lzchain::cli::run(argc, argv, std::cout, std::cerr);
}
