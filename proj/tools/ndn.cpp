#include <iostream>

#include "ndn/harness/cli.hpp"

int main(int argc, char** argv) {
  return ndn::harness::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
