#include <iostream>
#include <string>
#include <vector>

#include "phaselens/cli.hpp"

int main(int argc, char** argv) {
  return phaselens::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
