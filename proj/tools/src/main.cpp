#include <iostream>
#include <string>
#include <vector>

#include "cccp_tools/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return cccp::cli::run(args, std::cout, std::cerr, cccp::cli::process_environment());
}
