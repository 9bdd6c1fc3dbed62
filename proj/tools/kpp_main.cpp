#include <iostream>
#include <string>
#include <vector>

#include "kpp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kpp::cli::run(args, std::cout, std::cerr);
}
