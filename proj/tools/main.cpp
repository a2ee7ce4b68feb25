#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "natr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  natr::CliEnvironment env;
  env.color = ::isatty(STDOUT_FILENO) && std::getenv("NO_COLOR") == nullptr;
  return natr::run_cli(args, std::cout, std::cerr, env);
}
