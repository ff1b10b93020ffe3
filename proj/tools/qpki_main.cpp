#include <iostream>
#include <string>
#include <vector>

#include "qpki/cli.hpp"

int main(int argc, char** argv) {
  return qpki::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc),
                            std::cout, std::cerr);
}
