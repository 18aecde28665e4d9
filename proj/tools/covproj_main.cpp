#include <string>
#include <vector>

#include "covproj/cli.hpp"

int main(int argc, char** argv) {
  return covproj::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
