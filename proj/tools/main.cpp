#include <iostream>

#include "dnnmodel/cli.hpp"

int main(int argc, char** argv) {
  return dnnmodel::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
