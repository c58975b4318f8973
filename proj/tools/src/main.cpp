#include <iostream>

#include "grouptrack/cli.hpp"

int main(int argc, char** argv) {
  return grouptrack::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
