#include <iostream>
#include <string>
#include <vector>

#include "evalanche/cli.hpp"

int main(int argc, char** argv) {
  return evalanche::cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
