#include <string>
#include <vector>

#include "displab/cli.hpp"

int main(int argc, char** argv) {
  return displab::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
