#include <string>
#include <vector>

#include "dlab/cli.hpp"

int main(int argc, char** argv) {
  return dlab::run(std::vector<std::string>(argv + 1, argv + argc));
}
