#include <vector>

#include "wolff/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wolff::dispatch(args);
}
