#include <iostream>
#include <string>
#include <vector>

#include "nsad/cli.h"

int main(int argc, char** argv) {
  return nsad::RunCli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
