#include <iostream>

#include "fracsurv/cli.hpp"

int main(int argc, char** argv) {
  return fracsurv::cli::run(argc, argv, std::cout, std::cerr);
}
