#include <vector>

#include "wf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wf::run_cli(args);
}
