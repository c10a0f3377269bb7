#include <string>
#include <vector>

#include "candy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return candy::cli::run_command(args);
}
