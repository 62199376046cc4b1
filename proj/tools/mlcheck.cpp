#include <iostream>

#include "mlcheck/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mlcheck::cli_main(args, std::cout, std::cerr);
}
