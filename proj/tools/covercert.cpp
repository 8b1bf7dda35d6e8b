#include <string>
#include <vector>

#include "covercert/cli.hpp"

int main(int argc, char** argv) {
  return covercert::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
