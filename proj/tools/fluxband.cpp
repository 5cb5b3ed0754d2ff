#include <string>
#include <vector>

#include "fluxband/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fluxband::run_cli(args);
}
