#include "hilbert/cli_runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hilbert::run_cli(args);
}
